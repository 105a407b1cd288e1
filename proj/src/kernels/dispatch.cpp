#include <atomic>
#include <cstdlib>

#include "hf/kernels/kernels.hpp"

namespace hf::kernels {

#if defined(HF_HAVE_AVX2_TU)
const Table* avx2_table();
#endif
#if defined(HF_HAVE_NEON_TU)
const Table* neon_table();
#endif

namespace {

const Table* best_for_cpu() {
#if defined(HF_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table();
#endif
#if defined(HF_HAVE_NEON_TU)
  return neon_table();
#endif
  return &scalar_table();
}

const Table* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "auto") return best_for_cpu();
#if defined(HF_HAVE_AVX2_TU)
  if (name == "avx2" && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_table();
#endif
#if defined(HF_HAVE_NEON_TU)
  if (name == "neon") return neon_table();
#endif
  return nullptr;
}

const Table* initial() {
  if (const char* env = std::getenv("HF_KERNELS")) {
    if (const Table* t = lookup(env)) return t;
  }
  return best_for_cpu();
}

std::atomic<const Table*>& slot() {
  static std::atomic<const Table*> s{initial()};
  return s;
}

}  // namespace

const Table& active() { return *slot().load(std::memory_order_relaxed); }

bool set_backend(std::string_view name) {
  const Table* t = lookup(name);
  if (!t) return false;
  slot().store(t, std::memory_order_relaxed);
  return true;
}

std::vector<const Table*> available_tables() {
  std::vector<const Table*> out{&scalar_table()};
#if defined(HF_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) out.push_back(avx2_table());
#endif
#if defined(HF_HAVE_NEON_TU)
  out.push_back(neon_table());
#endif
  return out;
}

}  // namespace hf::kernels
