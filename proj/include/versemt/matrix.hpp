#pragma once

#include <cstddef>
#include <vector>

namespace versemt {

#ifdef VERSEMT_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

using Vector = std::vector<real>;

// Dense row-major matrix. Plain storage; all arithmetic lives in kernels.hpp.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<real> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, real(0)) {}

  real* row(std::size_t i) { return data.data() + i * cols; }
  const real* row(std::size_t i) const { return data.data() + i * cols; }

  real& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  real at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::size_t size() const { return data.size(); }

  void zero() { data.assign(data.size(), real(0)); }

  bool operator==(const Matrix&) const = default;
};

}  // namespace versemt
