#include "versemt/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace versemt::kernels {

namespace serial {

void matvec(const Matrix& a, const real* x, real* y) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const real* row = a.row(i);
    real acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_add(const Matrix& a, const real* x, real* y) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const real* row = a.row(i);
    real acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

void matvec_t_add(const Matrix& a, const real* x, real* y) {
  for (std::size_t j = 0; j < a.cols; ++j) {
    real acc = 0;
    for (std::size_t i = 0; i < a.rows; ++i) acc += a.data[i * a.cols + j] * x[i];
    y[j] += acc;
  }
}

void outer_add(Matrix& g, const real* y, const real* x) {
  for (std::size_t i = 0; i < g.rows; ++i) {
    real* row = g.row(i);
    const real yi = y[i];
    for (std::size_t j = 0; j < g.cols; ++j) row[j] += yi * x[j];
  }
}

}  // namespace serial

void matvec(const Matrix& a, const real* x, real* y) {
  const long long n = static_cast<long long>(a.rows);
#pragma omp parallel for schedule(static) if (a.rows >= kParallelMinRows)
  for (long long i = 0; i < n; ++i) {
    const real* row = a.row(static_cast<std::size_t>(i));
    real acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_add(const Matrix& a, const real* x, real* y) {
  const long long n = static_cast<long long>(a.rows);
#pragma omp parallel for schedule(static) if (a.rows >= kParallelMinRows)
  for (long long i = 0; i < n; ++i) {
    const real* row = a.row(static_cast<std::size_t>(i));
    real acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

void matvec_t_add(const Matrix& a, const real* x, real* y) {
  const long long n = static_cast<long long>(a.cols);
  // Each output column accumulates top-to-bottom exactly as in the serial
  // version; threads split across columns.
#pragma omp parallel for schedule(static) if (a.cols >= kParallelMinRows)
  for (long long j = 0; j < n; ++j) {
    real acc = 0;
    for (std::size_t i = 0; i < a.rows; ++i)
      acc += a.data[i * a.cols + static_cast<std::size_t>(j)] * x[i];
    y[j] += acc;
  }
}

void outer_add(Matrix& g, const real* y, const real* x) {
  const long long n = static_cast<long long>(g.rows);
#pragma omp parallel for schedule(static) if (g.rows >= kParallelMinRows)
  for (long long i = 0; i < n; ++i) {
    real* row = g.row(static_cast<std::size_t>(i));
    const real yi = y[i];
    for (std::size_t j = 0; j < g.cols; ++j) row[j] += yi * x[j];
  }
}

void softmax_inplace(Vector& v) {
  real mx = v[0];
  for (real e : v) mx = std::max(mx, e);
  real sum = 0;
  for (real& e : v) {
    e = std::exp(e - mx);
    sum += e;
  }
  const real inv = real(1) / sum;
  for (real& e : v) e *= inv;
}

}  // namespace versemt::kernels
