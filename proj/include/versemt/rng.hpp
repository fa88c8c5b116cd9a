#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace versemt {

// Deterministic randomness used for splits, shuffles, and weight init.
//
// std::mt19937_64 output is pinned by the standard, but the standard
// distributions are not, so every mapping from raw draws to values is done
// here by hand. Identical seeds give identical results on any platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, bound). Modulo bias is negligible for corpus-sized bounds
  // and keeps the mapping trivially portable.
  std::uint64_t bounded(std::uint64_t bound) { return gen_() % bound; }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in [-scale, scale].
  double symmetric(double scale) { return (2.0 * unit() - 1.0) * scale; }

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Shuffled [0, n) index vector.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    return idx;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace versemt
