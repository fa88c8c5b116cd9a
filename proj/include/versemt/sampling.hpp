#pragma once

#include <cstdint>

#include "versemt/types.hpp"

namespace versemt {

struct SplitSpec {
  std::size_t n_test = 0;
  std::size_t n_val = 0;
  std::uint64_t seed = 0;
  std::size_t oversample_factor = 1;
};

struct SplitResult {
  ParallelCorpus train;
  ParallelCorpus val;
  ParallelCorpus test;
};

// Seed-keyed random split. A Fisher-Yates permutation of the pair indices
// (mt19937_64, modulo-bounded draws; see rng.hpp) selects test first, then
// validation; the remainder trains. Each output keeps the input's relative
// order. Throws DataError when n_test + n_val >= corpus size.
SplitResult split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec);

// `factor` verbatim concatenated copies of the corpus.
ParallelCorpus oversample(const ParallelCorpus& corpus, std::size_t factor);

}  // namespace versemt
