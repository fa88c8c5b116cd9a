#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "versemt/types.hpp"

namespace versemt {

// Frequency mining, candidate-translation shortlists, and the two
// token-level substitution modes: copy-through for names (with insertion
// when the target lacks any candidate) and canonicalization for verbs.

enum class Side { source, target };

struct TokenFrequencyTable {
  Side side = Side::source;
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;

  // Descending count, ties broken by ascending token.
  std::vector<std::pair<std::string, std::size_t>> ranked() const;
};

struct CandidateSet {
  std::string source_token;
  // (target token, number of co-occurring pairs), descending count.
  std::vector<std::pair<std::string, std::size_t>> candidates;
  // Pairs containing source_token whose target holds none of the candidates.
  std::size_t none_count = 0;
};

enum class RuleMode { name_copy, verb_canonical };

std::string rule_mode_name(RuleMode mode);
RuleMode rule_mode_from_name(const std::string& name);

struct SubstitutionRule {
  std::string source_token;
  std::string canonical;
  std::vector<std::string> candidates;
  RuleMode mode = RuleMode::verb_canonical;
};

struct SubstitutionTable {
  std::vector<SubstitutionRule> rules;
  bool aborted = false;  // review session ended early

  // Rejects a second rule for the same (source_token, mode).
  void add(SubstitutionRule rule);

  // Tab-separated, one rule per line: source, mode, canonical,
  // comma-joined candidates. Round-trips losslessly.
  void save(const std::filesystem::path& path) const;
  static SubstitutionTable load(const std::filesystem::path& path);
};

TokenFrequencyTable count_tokens(const ParallelCorpus& corpus, Side side);

// The `top_n` most frequent target-side tokens, the default filter for
// candidate mining.
std::unordered_set<std::string> default_stopwords(const ParallelCorpus& corpus,
                                                  std::size_t top_n = 20);

// Ranks target tokens by the number of pairs (among those whose source
// contains source_token) that contain them, filters stopwords, keeps top_k.
// Throws DataError when source_token never occurs on the source side.
CandidateSet mine_candidates(const ParallelCorpus& corpus, const std::string& source_token,
                             std::size_t top_k,
                             const std::unordered_set<std::string>& stopwords = {});

// Tab-separated, one set per line: source token, none_count, then
// alternating candidate and count columns. Round-trips losslessly.
void save_candidates(const std::vector<CandidateSet>& sets,
                     const std::filesystem::path& path);
std::vector<CandidateSet> load_candidates(const std::filesystem::path& path);

struct ReviewOptions {
  bool interactive = true;
  RuleMode default_mode = RuleMode::verb_canonical;
};

// Walks the operator through each candidate set on the given text channel:
// canonical choice (default: top candidate, or the source token itself when
// no candidate survived), mode, and covered candidates (default: all).
// 'q' at any prompt aborts, returning the partial table with the abort
// marker set. Non-interactive mode takes every default without prompting.
SubstitutionTable review_candidates(const std::vector<CandidateSet>& sets,
                                    std::istream& in, std::ostream& out,
                                    const ReviewOptions& options = {});

// Applies one rule to one pair; the source side is never modified. See the
// module docs for the insertion-position rule.
SentencePair apply_rule(const SentencePair& pair, const SubstitutionRule& rule);

// Applies every rule to every pair, in table order.
ParallelCorpus apply_table(const ParallelCorpus& corpus, const SubstitutionTable& table);

}  // namespace versemt
