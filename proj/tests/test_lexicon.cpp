#include "doctest.h"

#include <filesystem>
#include <sstream>
#include <string>

#include "versemt/errors.hpp"
#include "versemt/lexicon.hpp"
#include "versemt/rng.hpp"

using namespace versemt;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("versemt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ParallelCorpus corpus_of(std::initializer_list<std::pair<const char*, const char*>> rows) {
  ParallelCorpus corpus;
  int verse = 0;
  for (const auto& [src, tgt] : rows) {
    SentencePair pair;
    pair.ref = {"GEN", 1, ++verse};
    std::istringstream s(src), t(tgt);
    std::string tok;
    while (s >> tok) pair.source.push_back(tok);
    while (t >> tok) pair.target.push_back(tok);
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace

TEST_CASE("count_tokens counts the chosen side exactly") {
  auto corpus = corpus_of({{"a b a", "x"}});
  auto table = count_tokens(corpus, Side::source);
  CHECK(table.counts.at("a") == 2);
  CHECK(table.counts.at("b") == 1);
  CHECK(table.total == 3);

  auto tgt = count_tokens(corpus, Side::target);
  CHECK(tgt.counts.at("x") == 1);
  CHECK(tgt.total == 1);

  CHECK(count_tokens(ParallelCorpus{}, Side::source).counts.empty());
}

TEST_CASE("count_tokens total equals the sum of counts") {
  auto corpus = corpus_of({{"a b c a", "p q"}, {"b b", "p p p"}});
  for (Side side : {Side::source, Side::target}) {
    auto table = count_tokens(corpus, side);
    std::size_t sum = 0;
    for (const auto& [token, count] : table.counts) sum += count;
    CHECK(sum == table.total);
  }
}

TEST_CASE("ranked orders by descending count, ties by token") {
  auto corpus = corpus_of({{"b a b z a b", "x"}});
  auto ranked = count_tokens(corpus, Side::source).ranked();
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0] == std::pair<std::string, std::size_t>{"b", 3});
  CHECK(ranked[1] == std::pair<std::string, std::size_t>{"a", 2});
  CHECK(ranked[2] == std::pair<std::string, std::size_t>{"z", 1});
}

TEST_CASE("mine_candidates counts pair-level co-occurrence") {
  auto corpus = corpus_of({{"ngadto x", "paroon y"},
                           {"ngadto z", "paroon w"},
                           {"q", "r"}});
  auto set = mine_candidates(corpus, "ngadto", 1);
  CHECK(set.source_token == "ngadto");
  REQUIRE(set.candidates.size() == 1);
  CHECK(set.candidates[0] == std::pair<std::string, std::size_t>{"paroon", 2});
  CHECK(set.none_count == 0);
}

TEST_CASE("mine_candidates counts a target token once per pair") {
  auto corpus = corpus_of({{"dios a", "panginoon panginoon panginoon"}});
  auto set = mine_candidates(corpus, "dios", 5);
  REQUIRE_FALSE(set.candidates.empty());
  CHECK(set.candidates[0] == std::pair<std::string, std::size_t>{"panginoon", 1});
}

TEST_CASE("mine_candidates respects top_k and counts none pairs") {
  auto corpus = corpus_of({{"dios a", "panginoon x"},
                           {"dios b", "panginoon y"},
                           {"dios c", "jehova z"},
                           {"dios d", "wala"}});
  auto set = mine_candidates(corpus, "dios", 2, {"x", "y", "z", "wala"});
  REQUIRE(set.candidates.size() == 2);
  CHECK(set.candidates[0] == std::pair<std::string, std::size_t>{"panginoon", 2});
  CHECK(set.candidates[1] == std::pair<std::string, std::size_t>{"jehova", 1});
  CHECK(set.none_count == 1);

  // Candidate co-occurrence can never exceed the number of containing pairs.
  for (const auto& [cand, count] : set.candidates) CHECK(count <= 4);
}

TEST_CASE("mine_candidates: stopwords can empty the candidate list") {
  auto corpus = corpus_of({{"rare x", "ang"}});
  auto set = mine_candidates(corpus, "rare", 3, {"ang"});
  CHECK(set.candidates.empty());
  CHECK(set.none_count == 1);
}

TEST_CASE("mine_candidates rejects tokens absent from the source side") {
  auto corpus = corpus_of({{"a", "b"}});
  CHECK_THROWS_WITH_AS(mine_candidates(corpus, "zzz", 1), doctest::Contains("zzz"),
                       DataError);
}

TEST_CASE("default_stopwords takes the most frequent target tokens") {
  auto corpus = corpus_of({{"s", "at ng at sa"}, {"s", "at ng rare"}});
  auto stops = default_stopwords(corpus, 2);
  CHECK(stops.contains("at"));   // 3 occurrences
  CHECK(stops.contains("ng"));   // 2
  CHECK_FALSE(stops.contains("rare"));
}

TEST_CASE("apply_rule name_copy replaces candidates with the canonical") {
  SubstitutionRule rule{"dios", "dios", {"panginoon", "jehova"}, RuleMode::name_copy};
  SentencePair pair;
  pair.source = {"ug", "miingon", "ang", "dios"};
  pair.target = {"at", "sinabi", "ng", "panginoon"};
  auto out = apply_rule(pair, rule);
  CHECK(out.target == Tokens{"at", "sinabi", "ng", "dios"});
  CHECK(out.source == pair.source);
}

TEST_CASE("apply_rule name_copy inserts proportionally when nothing matched") {
  SubstitutionRule rule{"dios", "dios", {"panginoon", "jehova"}, RuleMode::name_copy};
  SentencePair pair;
  pair.source = {"ug", "miingon", "ang", "dios"};  // "dios" at index 3 of 4
  pair.target = {"at", "sinabi", "niya"};          // len 3 -> insert at 3*3/4 = 2
  auto out = apply_rule(pair, rule);
  CHECK(out.target == Tokens{"at", "sinabi", "dios", "niya"});
}

TEST_CASE("apply_rule verb_canonical never inserts") {
  SubstitutionRule rule{"ngadto", "paroon", {"pumaroon", "yumaon"},
                        RuleMode::verb_canonical};
  SentencePair pair;
  pair.source = {"ngadto", "siya"};
  pair.target = {"walang", "tugma"};
  auto out = apply_rule(pair, rule);
  CHECK(out.target == pair.target);

  pair.target = {"siya", "pumaroon"};
  out = apply_rule(pair, rule);
  CHECK(out.target == Tokens{"siya", "paroon"});
}

TEST_CASE("apply_rule leaves pairs without the source token untouched") {
  SubstitutionRule rule{"dios", "dios", {"panginoon"}, RuleMode::name_copy};
  SentencePair pair;
  pair.source = {"walay", "diyos", "dinhi"};
  pair.target = {"panginoon", "dito"};
  auto out = apply_rule(pair, rule);
  CHECK(out.target == pair.target);
}

TEST_CASE("apply_rule skips insertion when the canonical is already present") {
  SubstitutionRule rule{"dios", "dios", {"panginoon"}, RuleMode::name_copy};
  SentencePair pair;
  pair.source = {"dios"};
  pair.target = {"si", "dios", "ay"};
  auto out = apply_rule(pair, rule);
  CHECK(out.target == Tokens{"si", "dios", "ay"});
}

TEST_CASE("name_copy post-condition holds on randomized corpora") {
  SubstitutionRule rule{"dios", "dios", {"panginoon", "jehova"}, RuleMode::name_copy};
  Rng rng(17);
  const char* words[] = {"a", "b", "panginoon", "jehova", "dios", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    SentencePair pair;
    pair.ref = {"GEN", 1, trial + 1};
    std::size_t slen = 1 + rng.bounded(6), tlen = 1 + rng.bounded(6);
    for (std::size_t i = 0; i < slen; ++i) pair.source.push_back(words[rng.bounded(6)]);
    for (std::size_t i = 0; i < tlen; ++i) pair.target.push_back(words[rng.bounded(6)]);
    auto out = apply_rule(pair, rule);
    bool src_has = std::find(pair.source.begin(), pair.source.end(), "dios") !=
                   pair.source.end();
    if (!src_has) {
      CHECK(out.target == pair.target);
      continue;
    }
    bool canonical_seen = false;
    for (const auto& token : out.target) {
      CHECK(token != "panginoon");
      CHECK(token != "jehova");
      if (token == "dios") canonical_seen = true;
    }
    CHECK(canonical_seen);
    CHECK(out.target.size() >= pair.target.size());
    CHECK(out.target.size() <= pair.target.size() + 1);
  }
}

TEST_CASE("apply_table applies rules in order and is idempotent") {
  SubstitutionTable table;
  table.add({"dios", "dios", {"panginoon", "jehova"}, RuleMode::name_copy});
  table.add({"ngadto", "paroon", {"pumaroon", "yumaon"}, RuleMode::verb_canonical});

  auto corpus = corpus_of({{"ngadto sa dios", "pumaroon kay jehova"},
                           {"ngadto siya", "yumaon siya"},
                           {"wala", "wala"}});
  auto once = apply_table(corpus, table);
  CHECK(once.pairs[0].target == Tokens{"paroon", "kay", "dios"});
  CHECK(once.pairs[1].target == Tokens{"paroon", "siya"});
  CHECK(once.pairs[2].target == Tokens{"wala"});

  auto twice = apply_table(once, table);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    CHECK(twice.pairs[i].target == once.pairs[i].target);

  CHECK(apply_table(corpus, SubstitutionTable{}).pairs[0].target ==
        corpus.pairs[0].target);
}

TEST_CASE("apply_table equals folding apply_rule per pair") {
  SubstitutionTable table;
  table.add({"a", "x", {"p", "q"}, RuleMode::name_copy});
  table.add({"b", "y", {"r"}, RuleMode::verb_canonical});
  Rng rng(23);
  const char* words[] = {"a", "b", "p", "q", "r", "z"};
  ParallelCorpus corpus;
  for (int i = 0; i < 100; ++i) {
    SentencePair pair;
    pair.ref = {"GEN", 1, i + 1};
    std::size_t slen = 1 + rng.bounded(5), tlen = 1 + rng.bounded(5);
    for (std::size_t k = 0; k < slen; ++k) pair.source.push_back(words[rng.bounded(6)]);
    for (std::size_t k = 0; k < tlen; ++k) pair.target.push_back(words[rng.bounded(6)]);
    corpus.pairs.push_back(std::move(pair));
  }
  auto bulk = apply_table(corpus, table);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    SentencePair expect = corpus.pairs[i];
    for (const auto& rule : table.rules) expect = apply_rule(expect, rule);
    CHECK(bulk.pairs[i].target == expect.target);
    CHECK(bulk.pairs[i].source == expect.source);
  }
}

TEST_CASE("table rejects duplicate (source, mode) rules and empty canonicals") {
  SubstitutionTable table;
  table.add({"dios", "dios", {"panginoon"}, RuleMode::name_copy});
  CHECK_THROWS_AS(table.add({"dios", "other", {"x"}, RuleMode::name_copy}), DataError);
  CHECK_NOTHROW(table.add({"dios", "paroon", {"x"}, RuleMode::verb_canonical}));
  CHECK_THROWS_AS(table.add({"w", "", {"x"}, RuleMode::name_copy}), DataError);
  CHECK_THROWS_AS(table.add({"w", "c", {}, RuleMode::verb_canonical}), DataError);
  CHECK_NOTHROW(table.add({"w", "c", {}, RuleMode::name_copy}));
}

TEST_CASE("substitution table saves and loads losslessly") {
  auto dir = temp_dir("lexicon_table");
  SubstitutionTable table;
  table.add({"dios", "dios", {"panginoon", "jehova"}, RuleMode::name_copy});
  table.add({"ngadto", "paroon", {"pumaroon"}, RuleMode::verb_canonical});
  table.save(dir / "rules.tsv");
  auto back = SubstitutionTable::load(dir / "rules.tsv");
  REQUIRE(back.rules.size() == 2);
  CHECK_FALSE(back.aborted);
  CHECK(back.rules[0].source_token == "dios");
  CHECK(back.rules[0].canonical == "dios");
  CHECK(back.rules[0].candidates == std::vector<std::string>{"panginoon", "jehova"});
  CHECK(back.rules[0].mode == RuleMode::name_copy);
  CHECK(back.rules[1].mode == RuleMode::verb_canonical);

  table.aborted = true;
  table.save(dir / "aborted.tsv");
  CHECK(SubstitutionTable::load(dir / "aborted.tsv").aborted);
}

TEST_CASE("candidate sets save and load losslessly") {
  auto dir = temp_dir("lexicon_cands");
  std::vector<CandidateSet> sets;
  sets.push_back({"ngadto", {{"paroon", 341}, {"pumaroon", 80}}, 12});
  sets.push_back({"lonely", {}, 3});
  save_candidates(sets, dir / "cands.tsv");
  auto back = load_candidates(dir / "cands.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].source_token == "ngadto");
  CHECK(back[0].none_count == 12);
  REQUIRE(back[0].candidates.size() == 2);
  CHECK(back[0].candidates[0] == std::pair<std::string, std::size_t>{"paroon", 341});
  CHECK(back[0].candidates[1] == std::pair<std::string, std::size_t>{"pumaroon", 80});
  CHECK(back[1].source_token == "lonely");
  CHECK(back[1].candidates.empty());
  CHECK(back[1].none_count == 3);
}

TEST_CASE("review accepts defaults") {
  std::vector<CandidateSet> sets = {
      {"ngadto", {{"paroon", 341}, {"pumaroon", 80}}, 5}};
  std::istringstream in("\n\n\n");
  std::ostringstream out;
  auto table = review_candidates(sets, in, out);
  REQUIRE(table.rules.size() == 1);
  CHECK_FALSE(table.aborted);
  const auto& rule = table.rules[0];
  CHECK(rule.source_token == "ngadto");
  CHECK(rule.canonical == "paroon");
  CHECK(rule.mode == RuleMode::verb_canonical);
  CHECK(rule.candidates == std::vector<std::string>{"paroon", "pumaroon"});

  // The transcript shows the ranked candidates and the none tally.
  std::string shown = out.str();
  CHECK(shown.find("[1] paroon (341)") != std::string::npos);
  CHECK(shown.find("[2] pumaroon (80)") != std::string::npos);
  CHECK(shown.find("none: 5") != std::string::npos);
}

TEST_CASE("review accepts numeric picks, literals, and candidate lists") {
  std::vector<CandidateSet> sets = {
      {"dios", {{"panginoon", 9}, {"jehova", 4}}, 0},
      {"ngadto", {{"paroon", 7}, {"pumaroon", 2}}, 1}};
  std::istringstream in(
      "2\n"          // canonical: pick jehova by number
      "n\n"          // mode: name_copy
      "panginoon\n"  // cover only one candidate
      "custom\n"     // canonical: literal token
      "v\n"
      "\n");         // candidates: all
  std::ostringstream out;
  auto table = review_candidates(sets, in, out);
  REQUIRE(table.rules.size() == 2);
  CHECK(table.rules[0].canonical == "jehova");
  CHECK(table.rules[0].mode == RuleMode::name_copy);
  CHECK(table.rules[0].candidates == std::vector<std::string>{"panginoon"});
  CHECK(table.rules[1].canonical == "custom");
  CHECK(table.rules[1].mode == RuleMode::verb_canonical);
  CHECK(table.rules[1].candidates == std::vector<std::string>{"paroon", "pumaroon"});
}

TEST_CASE("review abort returns the partial table with the marker") {
  std::vector<CandidateSet> sets = {{"one", {{"a", 2}}, 0}, {"two", {{"b", 1}}, 0}};
  std::istringstream in("\n\n\n" "q\n");
  std::ostringstream out;
  auto table = review_candidates(sets, in, out);
  CHECK(table.aborted);
  REQUIRE(table.rules.size() == 1);
  CHECK(table.rules[0].source_token == "one");
}

TEST_CASE("review with no surviving candidates falls back to a copy rule") {
  std::vector<CandidateSet> sets = {{"aram", {}, 4}};
  std::istringstream in("\n\n\n");
  std::ostringstream out;
  auto table = review_candidates(sets, in, out);
  REQUIRE(table.rules.size() == 1);
  CHECK(table.rules[0].canonical == "aram");
  CHECK(table.rules[0].mode == RuleMode::name_copy);
  CHECK(table.rules[0].candidates.empty());
}

TEST_CASE("non-interactive review takes every default silently") {
  std::vector<CandidateSet> sets = {
      {"ngadto", {{"paroon", 3}}, 0}, {"aram", {}, 1}};
  std::istringstream in;  // never read
  std::ostringstream out;
  ReviewOptions options;
  options.interactive = false;
  options.default_mode = RuleMode::verb_canonical;
  auto table = review_candidates(sets, in, out, options);
  REQUIRE(table.rules.size() == 2);
  CHECK(out.str().empty());
  CHECK(table.rules[0].canonical == "paroon");
  CHECK(table.rules[0].mode == RuleMode::verb_canonical);
  CHECK(table.rules[1].canonical == "aram");
  CHECK(table.rules[1].mode == RuleMode::name_copy);

  CHECK(review_candidates({}, in, out, options).rules.empty());
}

TEST_CASE("rule mode names round-trip") {
  CHECK(rule_mode_from_name(rule_mode_name(RuleMode::name_copy)) == RuleMode::name_copy);
  CHECK(rule_mode_from_name(rule_mode_name(RuleMode::verb_canonical)) ==
        RuleMode::verb_canonical);
  CHECK_THROWS_AS(rule_mode_from_name("bogus"), DataError);
}
