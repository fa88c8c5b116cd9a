#include "versemt/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "versemt/errors.hpp"

namespace versemt {

std::string rule_mode_name(RuleMode mode) {
  return mode == RuleMode::name_copy ? "name_copy" : "verb_canonical";
}

RuleMode rule_mode_from_name(const std::string& name) {
  if (name == "name_copy" || name == "n") return RuleMode::name_copy;
  if (name == "verb_canonical" || name == "v") return RuleMode::verb_canonical;
  throw DataError("unknown rule mode '" + name + "' (name_copy|verb_canonical)");
}

std::vector<std::pair<std::string, std::size_t>> TokenFrequencyTable::ranked() const {
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

TokenFrequencyTable count_tokens(const ParallelCorpus& corpus, Side side) {
  TokenFrequencyTable table;
  table.side = side;
  for (const auto& pair : corpus.pairs) {
    const Tokens& tokens = side == Side::source ? pair.source : pair.target;
    for (const std::string& token : tokens) {
      ++table.counts[token];
      ++table.total;
    }
  }
  return table;
}

std::unordered_set<std::string> default_stopwords(const ParallelCorpus& corpus,
                                                  std::size_t top_n) {
  auto ranked = count_tokens(corpus, Side::target).ranked();
  std::unordered_set<std::string> stops;
  for (std::size_t i = 0; i < ranked.size() && i < top_n; ++i)
    stops.insert(ranked[i].first);
  return stops;
}

CandidateSet mine_candidates(const ParallelCorpus& corpus, const std::string& source_token,
                             std::size_t top_k,
                             const std::unordered_set<std::string>& stopwords) {
  if (top_k < 1) throw DataError("top_k must be at least 1");

  // Pair-level co-occurrence: a target token counts once per pair.
  std::map<std::string, std::size_t> cooc;
  std::vector<const SentencePair*> containing;
  for (const auto& pair : corpus.pairs) {
    if (std::find(pair.source.begin(), pair.source.end(), source_token) ==
        pair.source.end())
      continue;
    containing.push_back(&pair);
    std::unordered_set<std::string> seen;
    for (const std::string& token : pair.target)
      if (seen.insert(token).second && !stopwords.contains(token)) ++cooc[token];
  }
  if (containing.empty())
    throw DataError("token '" + source_token + "' does not occur on the source side");

  std::vector<std::pair<std::string, std::size_t>> ranked(cooc.begin(), cooc.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);

  CandidateSet set;
  set.source_token = source_token;
  set.candidates = std::move(ranked);
  for (const SentencePair* pair : containing) {
    bool any = false;
    for (const auto& [cand, count] : set.candidates) {
      if (std::find(pair->target.begin(), pair->target.end(), cand) != pair->target.end()) {
        any = true;
        break;
      }
    }
    if (!any) ++set.none_count;
  }
  return set;
}

void save_candidates(const std::vector<CandidateSet>& sets,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const CandidateSet& set : sets) {
    out << set.source_token << '\t' << set.none_count;
    for (const auto& [token, count] : set.candidates) {
      out << '\t' << token << '\t' << count;
    }
    out << '\n';
  }
}

std::vector<CandidateSet> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<CandidateSet> sets;
  std::string line;
  std::size_t lineno = 0;
  auto parse_count = [&](const std::string& field) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw DataError("candidate line " + std::to_string(lineno) + ": bad count '" +
                      field + "'");
    return value;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() % 2 != 0)
      throw DataError("candidate line " + std::to_string(lineno) +
                      ": expected token, none_count, then candidate/count pairs");
    CandidateSet set;
    set.source_token = fields[0];
    set.none_count = parse_count(fields[1]);
    for (std::size_t i = 2; i < fields.size(); i += 2) {
      set.candidates.emplace_back(fields[i], parse_count(fields[i + 1]));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

void SubstitutionTable::add(SubstitutionRule rule) {
  if (rule.canonical.empty()) throw DataError("rule canonical token must be nonempty");
  if (rule.candidates.empty() && rule.mode != RuleMode::name_copy)
    throw DataError("rule for '" + rule.source_token +
                    "': only name_copy rules may have no candidates");
  for (const auto& existing : rules)
    if (existing.source_token == rule.source_token && existing.mode == rule.mode)
      throw DataError("duplicate rule for ('" + rule.source_token + "', " +
                      rule_mode_name(rule.mode) + ")");
  rules.push_back(std::move(rule));
}

void SubstitutionTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (aborted) out << "# aborted\n";
  for (const auto& rule : rules) {
    out << rule.source_token << '\t' << rule_mode_name(rule.mode) << '\t'
        << rule.canonical << '\t';
    for (std::size_t i = 0; i < rule.candidates.size(); ++i) {
      if (i) out << ',';
      out << rule.candidates[i];
    }
    out << '\n';
  }
}

SubstitutionTable SubstitutionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  SubstitutionTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "# aborted") table.aborted = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4)
      throw DataError("rule line " + std::to_string(lineno) + " needs 4 tab-separated fields");
    SubstitutionRule rule;
    rule.source_token = fields[0];
    rule.mode = rule_mode_from_name(fields[1]);
    rule.canonical = fields[2];
    if (!fields[3].empty()) {
      std::size_t pos = 0;
      while (true) {
        std::size_t comma = fields[3].find(',', pos);
        rule.candidates.push_back(
            fields[3].substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    table.add(std::move(rule));
  }
  return table;
}

namespace {

// One prompt round; returns false on operator abort.
bool prompt(std::istream& in, std::ostream& out, const std::string& label,
            const std::string& fallback, std::string& answer) {
  out << label << " [" << fallback << "]: " << std::flush;
  if (!std::getline(in, answer)) {
    answer = fallback;
    return true;
  }
  if (answer == "q") return false;
  if (answer.empty()) answer = fallback;
  return true;
}

}  // namespace

SubstitutionTable review_candidates(const std::vector<CandidateSet>& sets,
                                    std::istream& in, std::ostream& out,
                                    const ReviewOptions& options) {
  SubstitutionTable table;
  for (const CandidateSet& set : sets) {
    std::string default_canonical =
        set.candidates.empty() ? set.source_token : set.candidates.front().first;
    // A set with no surviving candidates can only become a copy rule.
    RuleMode default_mode =
        set.candidates.empty() ? RuleMode::name_copy : options.default_mode;

    SubstitutionRule rule;
    rule.source_token = set.source_token;
    rule.canonical = default_canonical;
    rule.mode = default_mode;
    for (const auto& [cand, count] : set.candidates) rule.candidates.push_back(cand);

    if (options.interactive) {
      out << set.source_token << '\n';
      for (std::size_t i = 0; i < set.candidates.size(); ++i)
        out << "  [" << i + 1 << "] " << set.candidates[i].first << " ("
            << set.candidates[i].second << ")\n";
      out << "  none: " << set.none_count << '\n';

      std::string answer;
      if (!prompt(in, out, "canonical", default_canonical, answer)) {
        table.aborted = true;
        return table;
      }
      // A number picks from the list; anything else is a literal token.
      std::size_t pick = 0;
      auto [p, ec] = std::from_chars(answer.data(), answer.data() + answer.size(), pick);
      if (ec == std::errc() && p == answer.data() + answer.size() && pick >= 1 &&
          pick <= set.candidates.size()) {
        rule.canonical = set.candidates[pick - 1].first;
      } else {
        rule.canonical = answer;
      }

      if (!prompt(in, out, "mode", rule_mode_name(default_mode), answer)) {
        table.aborted = true;
        return table;
      }
      rule.mode = rule_mode_from_name(answer);

      if (!prompt(in, out, "candidates", "all", answer)) {
        table.aborted = true;
        return table;
      }
      if (answer == "none") {
        rule.candidates.clear();
      } else if (answer != "all") {
        rule.candidates.clear();
        std::istringstream list(answer);
        std::string item;
        while (std::getline(list, item, ','))
          if (!item.empty()) rule.candidates.push_back(item);
      }
      if (rule.candidates.empty()) rule.mode = RuleMode::name_copy;
    }

    table.add(std::move(rule));
  }
  return table;
}

SentencePair apply_rule(const SentencePair& pair, const SubstitutionRule& rule) {
  auto first = std::find(pair.source.begin(), pair.source.end(), rule.source_token);
  if (first == pair.source.end()) return pair;

  SentencePair out = pair;
  bool canonical_present = false;
  for (std::string& token : out.target) {
    if (std::find(rule.candidates.begin(), rule.candidates.end(), token) !=
        rule.candidates.end())
      token = rule.canonical;
    if (token == rule.canonical) canonical_present = true;
  }
  if (rule.mode == RuleMode::name_copy && !canonical_present) {
    // Proportional placement: the canonical token lands where the source
    // token sits, rescaled to the target length.
    std::size_t src_index = static_cast<std::size_t>(first - pair.source.begin());
    std::size_t position = src_index * out.target.size() / pair.source.size();
    out.target.insert(out.target.begin() + position, rule.canonical);
  }
  return out;
}

ParallelCorpus apply_table(const ParallelCorpus& corpus, const SubstitutionTable& table) {
  ParallelCorpus out;
  out.source_language = corpus.source_language;
  out.target_language = corpus.target_language;
  out.pairs.resize(corpus.pairs.size());
  const long long n = static_cast<long long>(corpus.pairs.size());
#pragma omp parallel for schedule(static) if (n > 64)
  for (long long i = 0; i < n; ++i) {
    SentencePair pair = corpus.pairs[i];
    for (const SubstitutionRule& rule : table.rules) pair = apply_rule(pair, rule);
    out.pairs[i] = std::move(pair);
  }
  return out;
}

}  // namespace versemt
