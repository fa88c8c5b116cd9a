// Timing harness: serial reference kernels against the OpenMP versions, and
// a whole forward/backward pass at one model size. Also asserts the two
// kernel families agree bitwise, which is the contract that makes threaded
// runs reproducible.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "versemt/kernels.hpp"
#include "versemt/model.hpp"
#include "versemt/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace versemt;

namespace {

double now_seconds() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
#endif
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (real& v : m.data) v = static_cast<real>(rng.symmetric(1.0));
  return m;
}

Vector random_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  for (real& x : v) x = static_cast<real>(rng.symmetric(1.0));
  return v;
}

bool bench_matvec(std::size_t rows, std::size_t cols, int reps) {
  Rng rng(42);
  Matrix a = random_matrix(rows, cols, rng);
  Vector x = random_vector(cols, rng);
  Vector y_serial(rows), y_parallel(rows);

  double t0 = now_seconds();
  for (int r = 0; r < reps; ++r) kernels::serial::matvec(a, x.data(), y_serial.data());
  double serial = now_seconds() - t0;

  t0 = now_seconds();
  for (int r = 0; r < reps; ++r) kernels::matvec(a, x.data(), y_parallel.data());
  double parallel = now_seconds() - t0;

  bool identical = y_serial == y_parallel;
  std::printf("matvec      %5zux%-5zu  serial %8.3f ms  parallel %8.3f ms  x%5.2f  %s\n",
              rows, cols, 1e3 * serial / reps, 1e3 * parallel / reps, serial / parallel,
              identical ? "bitwise-identical" : "MISMATCH");
  return identical;
}

bool bench_outer(std::size_t rows, std::size_t cols, int reps) {
  Rng rng(43);
  Vector y = random_vector(rows, rng);
  Vector x = random_vector(cols, rng);
  Matrix g_serial(rows, cols), g_parallel(rows, cols);

  double t0 = now_seconds();
  for (int r = 0; r < reps; ++r) kernels::serial::outer_add(g_serial, y.data(), x.data());
  double serial = now_seconds() - t0;

  t0 = now_seconds();
  for (int r = 0; r < reps; ++r) kernels::outer_add(g_parallel, y.data(), x.data());
  double parallel = now_seconds() - t0;

  bool identical = g_serial == g_parallel;
  std::printf("outer_add   %5zux%-5zu  serial %8.3f ms  parallel %8.3f ms  x%5.2f  %s\n",
              rows, cols, 1e3 * serial / reps, 1e3 * parallel / reps, serial / parallel,
              identical ? "bitwise-identical" : "MISMATCH");
  return identical;
}

void bench_model(bool attention, int reps) {
  ModelDims dims{2000, 2000, 64, 128};
  ModelParams params = init_params(dims, 7, real(0.08), attention);
  Rng rng(44);
  EncodedSentence src{2}, tgt{2};
  for (int i = 0; i < 12; ++i) {
    src.push_back(static_cast<std::uint32_t>(4 + rng.bounded(dims.src_vocab - 4)));
    tgt.push_back(static_cast<std::uint32_t>(4 + rng.bounded(dims.tgt_vocab - 4)));
  }
  src.push_back(3);
  tgt.push_back(3);

  double t0 = now_seconds();
  for (int r = 0; r < reps; ++r) {
    ForwardTrace trace = forward(src, tgt, params);
    Gradients grads = backward(trace, params);
    (void)grads;
  }
  double elapsed = now_seconds() - t0;
  std::printf("fwd+bwd     vocab 2000, embed 64, hidden 128, len 12, attention %-3s  %8.3f ms\n",
              attention ? "on" : "off", 1e3 * elapsed / reps);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  bool ok = true;
  ok &= bench_matvec(64, 64, 2000);
  ok &= bench_matvec(256, 256, 500);
  ok &= bench_matvec(1024, 1024, 100);
  ok &= bench_matvec(4096, 512, 100);
  ok &= bench_outer(256, 256, 500);
  ok &= bench_outer(1024, 1024, 100);
  ok &= bench_outer(4096, 512, 100);
  bench_model(false, 20);
  bench_model(true, 20);

  if (!ok) {
    std::fprintf(stderr, "serial and parallel kernels disagree\n");
    return 1;
  }
  return 0;
}
