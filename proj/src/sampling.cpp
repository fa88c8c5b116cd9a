#include "versemt/sampling.hpp"

#include <algorithm>

#include "versemt/errors.hpp"
#include "versemt/rng.hpp"

namespace versemt {

SplitResult split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec) {
  const std::size_t n = corpus.size();
  if (spec.n_test + spec.n_val >= n)
    throw DataError("split needs more than " + std::to_string(spec.n_test + spec.n_val) +
                    " pairs, corpus has " + std::to_string(n));

  Rng rng(spec.seed);
  std::vector<std::size_t> perm = rng.permutation(n);

  std::vector<std::size_t> test_idx(perm.begin(), perm.begin() + spec.n_test);
  std::vector<std::size_t> val_idx(perm.begin() + spec.n_test,
                                   perm.begin() + spec.n_test + spec.n_val);
  std::vector<bool> held(n, false);
  for (std::size_t i : test_idx) held[i] = true;
  for (std::size_t i : val_idx) held[i] = true;

  std::sort(test_idx.begin(), test_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  auto gather = [&corpus](const std::vector<std::size_t>& idx) {
    ParallelCorpus out;
    out.source_language = corpus.source_language;
    out.target_language = corpus.target_language;
    out.pairs.reserve(idx.size());
    for (std::size_t i : idx) out.pairs.push_back(corpus.pairs[i]);
    return out;
  };

  SplitResult result;
  result.test = gather(test_idx);
  result.val = gather(val_idx);
  result.train.source_language = corpus.source_language;
  result.train.target_language = corpus.target_language;
  result.train.pairs.reserve(n - spec.n_test - spec.n_val);
  for (std::size_t i = 0; i < n; ++i)
    if (!held[i]) result.train.pairs.push_back(corpus.pairs[i]);
  return result;
}

ParallelCorpus oversample(const ParallelCorpus& corpus, std::size_t factor) {
  if (factor < 1) throw DataError("oversample factor must be at least 1");
  ParallelCorpus out;
  out.source_language = corpus.source_language;
  out.target_language = corpus.target_language;
  out.pairs.reserve(corpus.size() * factor);
  for (std::size_t k = 0; k < factor; ++k)
    out.pairs.insert(out.pairs.end(), corpus.pairs.begin(), corpus.pairs.end());
  return out;
}

}  // namespace versemt
