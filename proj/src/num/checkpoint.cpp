#include "hf/num/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hf/common/error.hpp"

namespace hf::num {

namespace {

constexpr char kMagic[4] = {'R', 'G', 'V', 'F'};
constexpr std::uint8_t kVersion = 0x01;

void put_u32le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64le(std::ostream& os, double d) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

void save_mlp(const std::filesystem::path& path, const MlpParams& p, nlohmann::json meta) {
  meta["layer_sizes"] = p.layer_sizes;
  meta["activation"] = to_string(p.output);
  std::string doc = meta.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, 4);
  os.put(static_cast<char>(kVersion));
  put_u32le(os, static_cast<std::uint32_t>(doc.size()));
  os.write(doc.data(), static_cast<std::streamsize>(doc.size()));
  for (double d : p.flat) put_f64le(os, d);
  if (!os) throw Error("checkpoint write failed: " + path.string());
}

MlpParams load_mlp(const std::filesystem::path& path, nlohmann::json* meta_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("bad checkpoint magic: " + path.string());
  int version = is.get();
  if (version != kVersion) throw Error("unsupported checkpoint version: " + path.string());
  std::uint32_t len = get_u32le(is);
  std::string doc(len, '\0');
  is.read(doc.data(), len);
  if (!is) throw Error("truncated checkpoint metadata: " + path.string());
  nlohmann::json meta = nlohmann::json::parse(doc, nullptr, false);
  if (meta.is_discarded()) throw Error("corrupt checkpoint metadata: " + path.string());

  MlpParams p;
  p.layer_sizes = meta.at("layer_sizes").get<std::vector<int>>();
  p.output = output_activation_from_string(meta.at("activation").get<std::string>());
  std::size_t count = MlpParams::param_count(p.layer_sizes);
  p.flat.resize(count);
  for (std::size_t i = 0; i < count; ++i) p.flat[i] = get_f64le(is);
  if (!is) throw Error("truncated checkpoint parameters: " + path.string());
  if (meta_out) *meta_out = std::move(meta);
  return p;
}

}  // namespace hf::num
