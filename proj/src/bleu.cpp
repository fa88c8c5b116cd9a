#include "versemt/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "versemt/errors.hpp"

namespace versemt {

std::string smoothing_name(Smoothing s) {
  return s == Smoothing::none ? "none" : "add_one_high_order";
}

Smoothing smoothing_from_name(const std::string& name) {
  if (name == "none") return Smoothing::none;
  if (name == "add_one_high_order" || name == "add1") return Smoothing::add_one_high_order;
  throw DataError("unknown smoothing '" + name + "' (none|add_one_high_order)");
}

std::unordered_map<std::string, std::size_t> ngram_multiset(const Tokens& tokens, int n) {
  if (n < 1) throw DataError("n-gram order must be at least 1");
  std::unordered_map<std::string, std::size_t> grams;
  if (tokens.size() < static_cast<std::size_t>(n)) return grams;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++grams[key];
  }
  return grams;
}

PrecisionCounts modified_precision(const std::vector<Tokens>& hyps,
                                   const std::vector<Tokens>& refs, int n) {
  if (hyps.size() != refs.size())
    throw DataError("hypothesis/reference count mismatch: " + std::to_string(hyps.size()) +
                    " vs " + std::to_string(refs.size()));
  if (hyps.empty()) throw DataError("empty evaluation corpus");

  PrecisionCounts counts;
  std::vector<PrecisionCounts> per_sentence(hyps.size());
  const long long m = static_cast<long long>(hyps.size());
#pragma omp parallel for schedule(static) if (m > 8)
  for (long long s = 0; s < m; ++s) {
    auto hyp_grams = ngram_multiset(hyps[s], n);
    auto ref_grams = ngram_multiset(refs[s], n);
    PrecisionCounts c;
    for (const auto& [gram, count] : hyp_grams) {
      c.total += count;
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) c.matched += std::min(count, it->second);
    }
    per_sentence[s] = c;
  }
  for (const auto& c : per_sentence) {
    counts.matched += c.matched;
    counts.total += c.total;
  }
  return counts;
}

double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (ref_len == 0 || hyp_len >= ref_len) return 1.0;
  if (hyp_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

BleuReport corpus_bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                       int max_n, Smoothing smoothing) {
  if (max_n < 1) throw DataError("max_n must be at least 1");
  BleuReport report;
  report.smoothing = smoothing;
  report.max_n = max_n;

  for (const Tokens& h : hyps) report.hyp_length += h.size();
  for (const Tokens& r : refs) report.ref_length += r.size();

  double log_sum = 0.0;
  bool zero_precision = false;
  for (int n = 1; n <= max_n; ++n) {
    PrecisionCounts c = modified_precision(hyps, refs, n);
    double p;
    if (smoothing == Smoothing::add_one_high_order && n > 1 && c.matched == 0) {
      p = static_cast<double>(c.matched + 1) / static_cast<double>(c.total + 1);
    } else if (c.total == 0) {
      // No hypothesis n-grams of this order exist; vacuously precise.
      p = 1.0;
    } else {
      p = static_cast<double>(c.matched) / static_cast<double>(c.total);
    }
    report.precisions.push_back(p);
    if (p == 0.0) zero_precision = true;
    else log_sum += std::log(p);
  }

  report.brevity_penalty = brevity_penalty(report.hyp_length, report.ref_length);
  if (zero_precision || report.brevity_penalty == 0.0) {
    report.score = 0.0;
  } else {
    report.score = 100.0 * report.brevity_penalty * std::exp(log_sum / max_n);
  }
  return report;
}

BleuReport sentence_bleu(const Tokens& hyp, const Tokens& ref, int max_n,
                         Smoothing smoothing) {
  return corpus_bleu({hyp}, {ref}, max_n, smoothing);
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", score);
  return buf;
}

std::string format_report(const BleuReport& report) {
  std::string out = "{\n";
  out += "  \"score\": " + format_score(report.score) + ",\n";
  out += "  \"precisions\": [";
  for (std::size_t i = 0; i < report.precisions.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", report.precisions[i]);
    if (i) out += ", ";
    out += buf;
  }
  out += "],\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "  \"brevity_penalty\": %.6f,\n", report.brevity_penalty);
  out += buf;
  out += "  \"hyp_length\": " + std::to_string(report.hyp_length) + ",\n";
  out += "  \"ref_length\": " + std::to_string(report.ref_length) + ",\n";
  out += "  \"smoothing\": \"" + smoothing_name(report.smoothing) + "\",\n";
  out += "  \"max_n\": " + std::to_string(report.max_n) + "\n";
  out += "}\n";
  return out;
}

}  // namespace versemt
