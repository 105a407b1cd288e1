#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hf/common/error.hpp"

namespace hf::num {

// Dense row-major f64 tensor, rank <= 2. Vectors are stored as 1 x n.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) throw ShapeError("negative tensor dimension");
  }
  Tensor(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != static_cast<std::size_t>(r) * c)
      throw ShapeError("tensor data length does not match shape");
  }

  static Tensor vec(std::vector<double> d) {
    int n = static_cast<int>(d.size());
    return Tensor(1, n, std::move(d));
  }

  int size() const { return rows * cols; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols,
                                          static_cast<std::size_t>(cols)}; }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }

  bool finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace hf::num
