#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "versemt/types.hpp"

namespace versemt {

enum class Smoothing { none, add_one_high_order };

std::string smoothing_name(Smoothing s);
Smoothing smoothing_from_name(const std::string& name);

struct BleuReport {
  double score = 0.0;                // 0-100 scale
  std::vector<double> precisions;    // p_1..p_max_n
  double brevity_penalty = 1.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  Smoothing smoothing = Smoothing::none;
  int max_n = 4;
};

// Contiguous n-grams with multiplicity; keys are tokens joined with '\x1f'.
// Empty when the sentence is shorter than n.
std::unordered_map<std::string, std::size_t> ngram_multiset(const Tokens& tokens, int n);

struct PrecisionCounts {
  std::size_t matched = 0;
  std::size_t total = 0;
};

// Clipped n-gram matches summed over the corpus: per sentence, each
// hypothesis n-gram count is capped at its reference count.
// Throws DataError when |hyps| != |refs| or both are empty.
PrecisionCounts modified_precision(const std::vector<Tokens>& hyps,
                                   const std::vector<Tokens>& refs, int n);

// 1 when the hypothesis is at least reference length (or the reference is
// empty); exp(1 - ref/hyp) when shorter; 0 for an empty hypothesis against a
// nonempty reference.
double brevity_penalty(std::size_t hyp_len, std::size_t ref_len);

// Geometric mean of p_1..p_max_n with uniform weights, times the brevity
// penalty from summed lengths, scaled to [0, 100]. An order with no
// hypothesis n-grams at all contributes p_n = 1; with Smoothing::none any
// zero-match order with nonzero total floors the score to 0; add-one
// smoothing replaces zero-match counts for n > 1 by (matched+1)/(total+1).
BleuReport corpus_bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                       int max_n = 4, Smoothing smoothing = Smoothing::none);

BleuReport sentence_bleu(const Tokens& hyp, const Tokens& ref, int max_n = 4,
                         Smoothing smoothing = Smoothing::add_one_high_order);

// Two-decimal rendering used in all reports ("20.01", "100.00").
std::string format_score(double score);

// JSON report with score, precisions, BP, lengths, and smoothing tag.
std::string format_report(const BleuReport& report);

}  // namespace versemt
