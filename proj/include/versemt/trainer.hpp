#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "versemt/model.hpp"
#include "versemt/types.hpp"
#include "versemt/vocab.hpp"

namespace versemt {

struct TrainConfig {
  real learning_rate = 0.05;
  real clip_norm = 5.0;
  std::size_t max_steps = 25000;
  std::size_t report_every = 1000;
  real stop_threshold = 2.0;
  std::size_t stop_patience = 5;
  std::uint64_t seed = 1;
  std::size_t validation_bleu_every = 1000;
  std::size_t decode_max_len = 50;
  real init_scale = 0.08;
};

// Throws DataError naming the offending field.
void validate(const TrainConfig& config);

struct LossRecord {
  std::size_t step = 0;
  real loss = 0;
};

struct BleuRecord {
  std::size_t step = 0;
  real bleu = 0;
};

struct TrainingLog {
  std::vector<LossRecord> records;        // mean loss since the previous record
  std::vector<BleuRecord> bleu_records;   // greedy-decode validation BLEU
};

std::string log_to_json(const TrainingLog& log);
TrainingLog log_from_json(const std::string& text);

// True when the last stop_patience recorded losses are all below
// stop_threshold, or the latest recorded step has reached max_steps.
bool should_stop(const TrainingLog& log, const TrainConfig& config);

enum class TrainStatus { ok, numeric_error };

struct TrainResult {
  ModelParams params;
  TrainingLog log;
  TrainStatus status = TrainStatus::ok;
  std::size_t steps_run = 0;
  std::string message;  // set on numeric_error
};

// One SGD update per pair in seed-keyed shuffled order, reshuffled each
// epoch, until should_stop fires or max_steps is reached. dims supplies
// embed_dim and hidden_dim; vocabulary sizes come from the vocabularies
// (nonzero dims.src_vocab/tgt_vocab must agree). A numeric failure halts
// early with the partial log and status numeric_error.
TrainResult run_training(const ParallelCorpus& train, const ParallelCorpus& val,
                         const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
                         const ModelDims& dims, bool attention,
                         const TrainConfig& config);

struct Checkpoint {
  ModelParams params;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  std::uint64_t step = 0;
};

// Binary checkpoint: fixed header (magic, format version, dims, attention
// flag, special token ids), both vocabularies, every parameter array as
// row-major 64-bit little-endian floats, and a trailing FNV-1a checksum.
// load distinguishes bad magic, version mismatch, truncation, and checksum
// failure via CheckpointError::kind.
void save_checkpoint(const ModelParams& params, const Vocabulary& src_vocab,
                     const Vocabulary& tgt_vocab, std::uint64_t step,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace versemt
