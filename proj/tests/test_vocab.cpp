#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "versemt/errors.hpp"
#include "versemt/rng.hpp"
#include "versemt/vocab.hpp"

using namespace versemt;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("versemt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("specials occupy the first four indices") {
  Vocabulary v;
  CHECK(v.size() == 4);
  CHECK(v.token_at(Vocabulary::kPad) == "<pad>");
  CHECK(v.token_at(Vocabulary::kUnk) == "<unk>");
  CHECK(v.token_at(Vocabulary::kBos) == "<s>");
  CHECK(v.token_at(Vocabulary::kEos) == "</s>");
}

TEST_CASE("build ranks by count then token, indices start at 4") {
  auto v = Vocabulary::build({{"a", "b", "a"}}, 100, 1);
  CHECK(v.size() == 6);
  CHECK(v.index_of("a") == 4);
  CHECK(v.index_of("b") == 5);
}

TEST_CASE("build: min_count filters rare tokens") {
  auto v = Vocabulary::build({{"a", "b", "a"}}, 100, 2);
  CHECK(v.size() == 5);
  CHECK(v.index_of("a") == 4);
  CHECK(v.index_of("b") == Vocabulary::kUnk);
}

TEST_CASE("build: empty side leaves only specials") {
  auto v = Vocabulary::build({}, 100, 1);
  CHECK(v.size() == 4);
}

TEST_CASE("build breaks frequency ties lexicographically") {
  auto v = Vocabulary::build({{"zz", "mm", "aa", "zz", "mm", "aa"}}, 100, 1);
  CHECK(v.index_of("aa") == 4);
  CHECK(v.index_of("mm") == 5);
  CHECK(v.index_of("zz") == 6);
}

TEST_CASE("build truncates to max_size minus the specials") {
  std::vector<Tokens> side = {{"w1", "w1", "w1", "w2", "w2", "w3", "w4"}};
  auto v = Vocabulary::build(side, 6, 1);
  CHECK(v.size() == 6);
  CHECK(v.index_of("w1") == 4);
  CHECK(v.index_of("w2") == 5);
  CHECK(v.index_of("w3") == Vocabulary::kUnk);  // lost the tie-break, then cut
  CHECK(v.index_of("w4") == Vocabulary::kUnk);
}

TEST_CASE("build rejects max_size of 4 or less") {
  CHECK_THROWS_AS(Vocabulary::build({{"a"}}, 4, 1), DataError);
  CHECK_THROWS_AS(Vocabulary::build({{"a"}}, 0, 1), DataError);
}

TEST_CASE("build is deterministic") {
  std::vector<Tokens> side = {{"c", "b", "c"}, {"a", "a", "b", "d"}};
  auto v1 = Vocabulary::build(side, 100, 1);
  auto v2 = Vocabulary::build(side, 100, 1);
  CHECK(v1 == v2);
}

TEST_CASE("encode wraps with BOS and EOS, maps unknowns to UNK") {
  auto v = Vocabulary::build({{"a", "b"}}, 100, 1);
  auto enc = v.encode({"a", "b"});
  CHECK(enc == EncodedSentence{Vocabulary::kBos, 4, 5, Vocabulary::kEos});

  auto with_unk = v.encode({"a", "mystery", "b"});
  CHECK(with_unk == EncodedSentence{Vocabulary::kBos, 4, Vocabulary::kUnk, 5,
                                    Vocabulary::kEos});

  CHECK(v.encode({}) == EncodedSentence{Vocabulary::kBos, Vocabulary::kEos});
}

TEST_CASE("decode inverts encode and strips structure") {
  auto v = Vocabulary::build({{"a", "b", "c"}}, 100, 1);
  CHECK(v.decode(v.encode({"b", "a", "c"})) == Tokens{"b", "a", "c"});
  CHECK(v.decode({Vocabulary::kBos, Vocabulary::kEos}) == Tokens{});
  CHECK(v.decode({Vocabulary::kBos, Vocabulary::kUnk, Vocabulary::kEos}) ==
        Tokens{"<unk>"});
  CHECK(v.decode({Vocabulary::kBos, Vocabulary::kPad, 4, Vocabulary::kEos}) ==
        Tokens{"a"});
}

TEST_CASE("decode rejects out-of-range indices") {
  auto v = Vocabulary::build({{"a"}}, 100, 1);
  CHECK_THROWS_AS(v.decode({Vocabulary::kBos, 5, Vocabulary::kEos}), DataError);
  CHECK_THROWS_AS(v.token_at(99), DataError);
}

TEST_CASE("roundtrip identity on random in-vocabulary sentences") {
  std::vector<Tokens> side;
  for (int i = 0; i < 30; ++i) side.push_back({"tok" + std::to_string(i)});
  auto v = Vocabulary::build(side, 100, 1);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Tokens sentence;
    std::size_t len = rng.bounded(12);
    for (std::size_t i = 0; i < len; ++i)
      sentence.push_back("tok" + std::to_string(rng.bounded(30)));
    auto enc = v.encode(sentence);
    CHECK(enc.front() == Vocabulary::kBos);
    CHECK(enc.back() == Vocabulary::kEos);
    CHECK(v.decode(enc) == sentence);
  }
}

TEST_CASE("save and load round-trip") {
  auto dir = temp_dir("vocab_io");
  auto v = Vocabulary::build({{"pag-ibig", "dios", "dios", "sa"}}, 100, 1);
  v.save(dir / "x.vocab");
  auto back = Vocabulary::load(dir / "x.vocab");
  CHECK(back == v);
  CHECK(back.index_of("dios") == v.index_of("dios"));

  std::ifstream in(dir / "x.vocab");
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line == "dios");  // line 0 is index 4
}

TEST_CASE("from_tokens rejects duplicates") {
  CHECK_THROWS_WITH_AS(Vocabulary::from_tokens({"a", "b", "a"}),
                       doctest::Contains("duplicate"), DataError);
}

TEST_CASE("no corpus token can claim a special index") {
  // Special literals occurring as corpus tokens rank like any other token
  // but the reserved indices stay bound to the specials.
  auto v = Vocabulary::build({{"<unk>", "word"}}, 100, 1);
  CHECK(v.token_at(Vocabulary::kUnk) == "<unk>");
  CHECK(v.index_of("word") >= Vocabulary::kNumSpecials);
}
