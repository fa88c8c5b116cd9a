#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "versemt/errors.hpp"
#include "versemt/trainer.hpp"

using namespace versemt;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("versemt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TrainingLog log_at_1000s(std::initializer_list<real> losses) {
  TrainingLog log;
  std::size_t step = 0;
  for (real loss : losses) log.records.push_back({step += 1000, loss});
  return log;
}

// Six distinct source words mapping one-to-one onto six target words; easy
// to memorize and big enough for nontrivial vocabularies.
ParallelCorpus toy_corpus() {
  ParallelCorpus corpus;
  const char* src[] = {"usa", "duha", "tulo", "upat", "lima", "unom"};
  const char* tgt[] = {"isa", "dalawa", "tatlo", "apat", "lima", "anim"};
  for (int i = 0; i < 6; ++i) {
    corpus.pairs.push_back({{"GEN", 1, i + 1},
                            {src[i], src[(i + 1) % 6]},
                            {tgt[i], tgt[(i + 1) % 6]}});
  }
  return corpus;
}

struct Built {
  ParallelCorpus corpus;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
};

Built built_toy() {
  Built b;
  b.corpus = toy_corpus();
  std::vector<Tokens> src_side, tgt_side;
  for (const auto& pair : b.corpus.pairs) {
    src_side.push_back(pair.source);
    tgt_side.push_back(pair.target);
  }
  b.src_vocab = Vocabulary::build(src_side, 100, 1);
  b.tgt_vocab = Vocabulary::build(tgt_side, 100, 1);
  return b;
}

bool params_bitwise_equal(const ModelParams& a, const ModelParams& b) {
  if (a.attention != b.attention) return false;
  std::vector<const std::vector<real>*> lhs, rhs;
  visit_arrays(a, [&](const char*, const std::vector<real>& v) { lhs.push_back(&v); });
  visit_arrays(b, [&](const char*, const std::vector<real>& v) { rhs.push_back(&v); });
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (*lhs[i] != *rhs[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("validate names the offending field") {
  TrainConfig config;
  CHECK_NOTHROW(validate(config));

  config.learning_rate = -0.1;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("learning_rate"), DataError);
  config = TrainConfig{};

  config.max_steps = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("max_steps"), DataError);
  config = TrainConfig{};

  config.report_every = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("report_every"), DataError);
  config = TrainConfig{};

  config.stop_patience = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("stop_patience"), DataError);
  config = TrainConfig{};

  config.stop_threshold = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("stop_threshold"), DataError);
  config = TrainConfig{};

  config.decode_max_len = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("decode_max_len"), DataError);
  config = TrainConfig{};

  config.init_scale = 0;
  CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("init_scale"), DataError);
}

TEST_CASE("training log JSON round-trips") {
  TrainingLog log;
  log.records = {{1000, real(2.5)}, {2000, real(1.75)}};
  log.bleu_records = {{1000, real(12.5)}};
  TrainingLog back = log_from_json(log_to_json(log));
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].step == 1000);
  CHECK(back.records[0].loss == doctest::Approx(2.5));
  CHECK(back.records[1].loss == doctest::Approx(1.75));
  REQUIRE(back.bleu_records.size() == 1);
  CHECK(back.bleu_records[0].bleu == doctest::Approx(12.5));

  TrainingLog empty_back = log_from_json(log_to_json(TrainingLog{}));
  CHECK(empty_back.records.empty());
  CHECK(empty_back.bleu_records.empty());

  CHECK_THROWS_AS(log_from_json("not json"), DataError);
  CHECK_THROWS_AS(log_from_json("{\"records\": [{}], \"bleu_records\": []}"), DataError);
}

TEST_CASE("should_stop fires when the patience window sits below the threshold") {
  TrainConfig config;  // threshold 2.0, patience 5, max_steps 25000
  CHECK(should_stop(log_at_1000s({3.0, 2.5, 1.9, 1.8, 1.7, 1.6, 1.5}), config));
  CHECK_FALSE(should_stop(log_at_1000s({1.9, 1.8, 2.1, 1.7, 1.6}), config));
  CHECK_FALSE(should_stop(log_at_1000s({1.9, 1.8, 1.7}), config));  // under patience
  CHECK_FALSE(should_stop(TrainingLog{}, config));
  // The comparison is strict: exactly-at-threshold values do not count.
  CHECK_FALSE(should_stop(log_at_1000s({1.9, 1.8, 1.7, 2.0, 1.6}), config));
}

TEST_CASE("should_stop fires once the latest record reaches max_steps") {
  TrainConfig config;
  config.max_steps = 5000;
  CHECK(should_stop(log_at_1000s({9.0, 9.0, 9.0, 9.0, 9.0}), config));
  CHECK_FALSE(should_stop(log_at_1000s({9.0, 9.0}), config));
}

TEST_CASE("one loss at or above the threshold anywhere in the window blocks stopping") {
  TrainConfig config;
  config.stop_patience = 4;
  for (std::size_t spike = 3; spike < 7; ++spike) {
    std::vector<real> losses(7, real(1.0));
    losses[spike] = real(2.0);
    TrainingLog log;
    std::size_t step = 0;
    for (real loss : losses) log.records.push_back({step += 1000, loss});
    CHECK_FALSE(should_stop(log, config));
  }
}

TEST_CASE("run_training: max_steps=1 performs exactly one update") {
  auto built = built_toy();
  TrainConfig config;
  config.max_steps = 1;
  config.report_every = 1;
  config.validation_bleu_every = 0;
  auto result = run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                             {0, 0, 4, 5}, false, config);
  CHECK(result.status == TrainStatus::ok);
  CHECK(result.steps_run == 1);
  REQUIRE(result.log.records.size() == 1);
  CHECK(result.log.records[0].step == 1);
  CHECK(result.log.records[0].loss > 0);
  CHECK(result.log.bleu_records.empty());

  ModelParams fresh = init_params(result.params.dims, config.seed, config.init_scale,
                                  false);
  CHECK_FALSE(params_bitwise_equal(result.params, fresh));
}

TEST_CASE("run_training honors max_steps mid-epoch and records mean losses") {
  auto built = built_toy();  // 6 pairs per epoch
  TrainConfig config;
  config.max_steps = 7;
  config.report_every = 2;
  config.validation_bleu_every = 0;
  auto result = run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                             {0, 0, 4, 5}, false, config);
  CHECK(result.steps_run == 7);
  REQUIRE(result.log.records.size() == 3);
  CHECK(result.log.records[0].step == 2);
  CHECK(result.log.records[1].step == 4);
  CHECK(result.log.records[2].step == 6);
}

TEST_CASE("run_training stops early when the loss settles below the threshold") {
  auto built = built_toy();
  TrainConfig config;
  config.max_steps = 10000;
  config.report_every = 1;
  config.stop_threshold = 100.0;  // any finite loss qualifies
  config.stop_patience = 3;
  config.validation_bleu_every = 0;
  auto result = run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                             {0, 0, 4, 5}, false, config);
  CHECK(result.steps_run == 3);
  CHECK(result.log.records.size() == 3);
}

TEST_CASE("run_training is deterministic") {
  auto dir = temp_dir("trainer_determinism");
  auto built = built_toy();
  TrainConfig config;
  config.max_steps = 40;
  config.report_every = 10;
  config.validation_bleu_every = 20;
  config.decode_max_len = 8;

  auto run_once = [&](const fs::path& ckpt) {
    auto result = run_training(built.corpus, built.corpus, built.src_vocab,
                               built.tgt_vocab, {0, 0, 4, 5}, true, config);
    save_checkpoint(result.params, built.src_vocab, built.tgt_vocab, result.steps_run,
                    ckpt);
    return result;
  };
  auto a = run_once(dir / "a.ckpt");
  auto b = run_once(dir / "b.ckpt");
  CHECK(a.steps_run == b.steps_run);
  CHECK(log_to_json(a.log) == log_to_json(b.log));
  CHECK(params_bitwise_equal(a.params, b.params));
  CHECK(read_bytes(dir / "a.ckpt") == read_bytes(dir / "b.ckpt"));

  REQUIRE(a.log.bleu_records.size() == 2);
  for (const auto& record : a.log.bleu_records) {
    CHECK(record.bleu >= 0.0);
    CHECK(record.bleu <= 100.0);
  }
}

TEST_CASE("run_training rejects bad inputs") {
  auto built = built_toy();
  TrainConfig config;
  config.max_steps = 1;
  CHECK_THROWS_AS(run_training({}, {}, built.src_vocab, built.tgt_vocab, {0, 0, 4, 5},
                               false, config),
                  DataError);
  // Dims that disagree with the actual vocabulary sizes.
  CHECK_THROWS_AS(run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                               {99, 0, 4, 5}, false, config),
                  DataError);
  config.learning_rate = 0;
  CHECK_THROWS_AS(run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                               {0, 0, 4, 5}, false, config),
                  DataError);
}

TEST_CASE("a numeric blowup halts training with a partial result") {
  auto built = built_toy();
  TrainConfig config;
  config.learning_rate = 1e200;  // guarantees overflow within a step or two
  config.clip_norm = 0;
  config.max_steps = 50;
  config.report_every = 1;
  config.validation_bleu_every = 0;
  auto result = run_training(built.corpus, {}, built.src_vocab, built.tgt_vocab,
                             {0, 0, 4, 5}, false, config);
  CHECK(result.status == TrainStatus::numeric_error);
  CHECK_FALSE(result.message.empty());
  CHECK(result.steps_run < 50);
}

TEST_CASE("checkpoints round-trip byte-exactly") {
  auto dir = temp_dir("trainer_ckpt");
  auto built = built_toy();
  for (bool attention : {false, true}) {
    CAPTURE(attention);
    ModelDims dims{built.src_vocab.size(), built.tgt_vocab.size(), 4, 5};
    ModelParams params = init_params(dims, 77, real(0.08), attention);
    fs::path path = dir / (attention ? "attn.ckpt" : "plain.ckpt");
    save_checkpoint(params, built.src_vocab, built.tgt_vocab, 123, path);

    Checkpoint ckpt = load_checkpoint(path);
    CHECK(ckpt.step == 123);
    CHECK(ckpt.src_vocab == built.src_vocab);
    CHECK(ckpt.tgt_vocab == built.tgt_vocab);
    CHECK(ckpt.params.attention == attention);
    CHECK(params_bitwise_equal(ckpt.params, params));

    // Saving the loaded model reproduces the file byte for byte.
    fs::path again = dir / "again.ckpt";
    save_checkpoint(ckpt.params, ckpt.src_vocab, ckpt.tgt_vocab, ckpt.step, again);
    CHECK(read_bytes(path) == read_bytes(again));
  }
}

TEST_CASE("checkpoint loader distinguishes every failure kind") {
  auto dir = temp_dir("trainer_ckpt_errors");
  auto built = built_toy();
  ModelDims dims{built.src_vocab.size(), built.tgt_vocab.size(), 3, 4};
  ModelParams params = init_params(dims, 5, real(0.08), false);
  fs::path good = dir / "good.ckpt";
  save_checkpoint(params, built.src_vocab, built.tgt_vocab, 9, good);
  const std::string bytes = read_bytes(good);

  auto kind_of = [&](const std::string& mutated) {
    fs::path path = dir / "mutated.ckpt";
    write_bytes(path, mutated);
    try {
      load_checkpoint(path);
    } catch (const CheckpointError& e) {
      return e.kind();
    }
    FAIL("expected CheckpointError");
    return CheckpointError::Kind::bad_magic;
  };

  SUBCASE("bad magic") {
    std::string mutated = bytes;
    mutated[0] = 'X';
    CHECK(kind_of(mutated) == CheckpointError::Kind::bad_magic);
    CHECK(kind_of("") == CheckpointError::Kind::truncated);  // too short for magic
  }

  SUBCASE("version mismatch") {
    std::string mutated = bytes;
    mutated[8] = 2;  // format version is the u32 after the 8-byte magic
    CHECK(kind_of(mutated) == CheckpointError::Kind::version_mismatch);
  }

  SUBCASE("truncation") {
    CHECK(kind_of(bytes.substr(0, bytes.size() - 4)) ==
          CheckpointError::Kind::truncated);
    CHECK(kind_of(bytes.substr(0, bytes.size() / 2)) ==
          CheckpointError::Kind::truncated);
    CHECK(kind_of(bytes.substr(0, 40)) == CheckpointError::Kind::truncated);
  }

  SUBCASE("corrupted parameter byte") {
    std::string mutated = bytes;
    mutated[bytes.size() - 16] ^= 0x40;  // inside the last parameter float
    CHECK(kind_of(mutated) == CheckpointError::Kind::checksum_mismatch);
  }

  SUBCASE("trailing garbage") {
    CHECK(kind_of(bytes + "xx") == CheckpointError::Kind::checksum_mismatch);
  }

  SUBCASE("stale checksum") {
    std::string mutated = bytes;
    mutated[mutated.size() - 1] ^= 0xff;
    CHECK(kind_of(mutated) == CheckpointError::Kind::checksum_mismatch);
  }

  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), IoError);
}
