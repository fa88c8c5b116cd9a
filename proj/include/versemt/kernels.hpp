#pragma once

#include <cstddef>

#include "versemt/matrix.hpp"

namespace versemt::kernels {

// Matrix-vector primitives behind the model math.
//
// kernels::serial holds the plain-loop reference implementations. The
// top-level functions are the OpenMP versions used everywhere else; they
// parallelize only across independent output elements, so every output
// entry is accumulated in the same order as the serial code and results
// are bitwise identical for any thread count.

namespace serial {

// y = A x
void matvec(const Matrix& a, const real* x, real* y);
// y += A x
void matvec_add(const Matrix& a, const real* x, real* y);
// y += A^T x
void matvec_t_add(const Matrix& a, const real* x, real* y);
// G += y x^T
void outer_add(Matrix& g, const real* y, const real* x);

}  // namespace serial

void matvec(const Matrix& a, const real* x, real* y);
void matvec_add(const Matrix& a, const real* x, real* y);
void matvec_t_add(const Matrix& a, const real* x, real* y);
void outer_add(Matrix& g, const real* y, const real* x);

// Numerically stable softmax over v, in place. Kept serial: its reductions
// are order-sensitive and v is at most vocabulary-sized.
void softmax_inplace(Vector& v);

// Rows below this stay serial; the pragma overhead dominates tiny matrices.
inline constexpr std::size_t kParallelMinRows = 64;

}  // namespace versemt::kernels
