#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "versemt/bleu.hpp"
#include "versemt/sampling.hpp"
#include "versemt/trainer.hpp"

namespace versemt {

// Everything the pipeline needs, one INI-style section per stage. See the
// README for the full key list and defaults.
struct PipelineConfig {
  // [paths]
  std::string source_xml;
  std::string target_xml;
  std::string work_dir;

  // [corpus]
  std::string source_language = "src";
  std::string target_language = "tgt";
  std::set<std::string> books;  // empty selects every book
  bool dedup = true;
  double max_ratio = 0;  // > 1 writes an outlier report; 0 disables

  // [split]
  SplitSpec split{610, 610, 1, 10};

  // [lexicon]
  bool lexicon_enabled = false;
  std::string lexicon_table;
  std::size_t lexicon_top_k = 10;
  std::string stopwords_path;

  // [vocab]
  std::size_t vocab_max_size = 50000;
  std::size_t vocab_min_count = 1;

  // [model]
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  bool attention = false;

  // [train]
  TrainConfig train;

  // [bleu]
  int bleu_max_n = 4;
  Smoothing bleu_smoothing = Smoothing::none;
};

// Parses the INI text: [section] headers, key = value lines, #/; comments.
// Unknown sections, unknown keys, duplicate keys, and unparseable values
// are DataErrors naming the offender. No path or invariant checks.
PipelineConfig parse_config(std::string_view text);

// Value invariants plus existence of the referenced input files.
void validate_config(const PipelineConfig& config);

// parse_config + validate_config on the file's contents.
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical INI rendering of every key; load_config(serialize_config(c))
// reproduces c. Written into the work directory for provenance.
std::string serialize_config(const PipelineConfig& config);

}  // namespace versemt
