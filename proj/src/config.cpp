#include "versemt/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "versemt/errors.hpp"

namespace versemt {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw DataError("config key " + key + ": expected " + expected + ", got '" + value + "'");
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double out = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value, "a number");
    return out;
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  bad_value(key, value, "a boolean (true/false)");
}

std::set<std::string> parse_books(const std::string& value) {
  std::set<std::string> books;
  std::stringstream stream{value};
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::string book = trim(item);
    if (!book.empty()) books.insert(book);
  }
  return books;
}

// Shortest round-trip rendering, so identical values echo identically.
std::string fmt_real(double v) { return nlohmann::json(v).dump(); }

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig config;
  std::set<std::string> seen;
  std::string section;

  std::istringstream stream{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw DataError("config line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> kSections = {
          "paths", "corpus", "split", "lexicon", "vocab", "model", "train", "bleu"};
      if (!kSections.contains(section)) {
        throw DataError("unknown config section: [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    if (section.empty()) {
      throw DataError("config line " + std::to_string(lineno) + ": key outside any section");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw DataError("duplicate config key: " + full);

    if (full == "paths.source_xml") config.source_xml = value;
    else if (full == "paths.target_xml") config.target_xml = value;
    else if (full == "paths.work_dir") config.work_dir = value;
    else if (full == "corpus.source_language") config.source_language = value;
    else if (full == "corpus.target_language") config.target_language = value;
    else if (full == "corpus.books") config.books = parse_books(value);
    else if (full == "corpus.dedup") config.dedup = parse_bool(full, value);
    else if (full == "corpus.max_ratio") config.max_ratio = parse_real(full, value);
    else if (full == "split.n_test") config.split.n_test = parse_size(full, value);
    else if (full == "split.n_val") config.split.n_val = parse_size(full, value);
    else if (full == "split.seed") config.split.seed = parse_u64(full, value);
    else if (full == "split.oversample") config.split.oversample_factor = parse_size(full, value);
    else if (full == "lexicon.enabled") config.lexicon_enabled = parse_bool(full, value);
    else if (full == "lexicon.table") config.lexicon_table = value;
    else if (full == "lexicon.top_k") config.lexicon_top_k = parse_size(full, value);
    else if (full == "lexicon.stopwords") config.stopwords_path = value;
    else if (full == "vocab.max_size") config.vocab_max_size = parse_size(full, value);
    else if (full == "vocab.min_count") config.vocab_min_count = parse_size(full, value);
    else if (full == "model.embed_dim") config.embed_dim = parse_size(full, value);
    else if (full == "model.hidden_dim") config.hidden_dim = parse_size(full, value);
    else if (full == "model.attention") config.attention = parse_bool(full, value);
    else if (full == "train.learning_rate") config.train.learning_rate = static_cast<real>(parse_real(full, value));
    else if (full == "train.clip_norm") config.train.clip_norm = static_cast<real>(parse_real(full, value));
    else if (full == "train.max_steps") config.train.max_steps = parse_size(full, value);
    else if (full == "train.report_every") config.train.report_every = parse_size(full, value);
    else if (full == "train.stop_threshold") config.train.stop_threshold = static_cast<real>(parse_real(full, value));
    else if (full == "train.stop_patience") config.train.stop_patience = parse_size(full, value);
    else if (full == "train.seed") config.train.seed = parse_u64(full, value);
    else if (full == "train.validation_bleu_every") config.train.validation_bleu_every = parse_size(full, value);
    else if (full == "train.decode_max_len") config.train.decode_max_len = parse_size(full, value);
    else if (full == "train.init_scale") config.train.init_scale = static_cast<real>(parse_real(full, value));
    else if (full == "bleu.max_n") config.bleu_max_n = static_cast<int>(parse_size(full, value));
    else if (full == "bleu.smoothing") {
      try {
        config.bleu_smoothing = smoothing_from_name(value);
      } catch (const DataError&) {
        bad_value(full, value, "none or add_one_high_order");
      }
    } else {
      throw DataError("unknown config key: " + full);
    }
  }
  return config;
}

void validate_config(const PipelineConfig& config) {
  if (config.source_xml.empty()) throw DataError("config key paths.source_xml is required");
  if (config.target_xml.empty()) throw DataError("config key paths.target_xml is required");
  if (config.work_dir.empty()) throw DataError("config key paths.work_dir is required");
  if (!std::filesystem::exists(config.source_xml)) {
    throw DataError("corpus path does not exist: " + config.source_xml);
  }
  if (!std::filesystem::exists(config.target_xml)) {
    throw DataError("corpus path does not exist: " + config.target_xml);
  }
  if (config.max_ratio != 0 && !(config.max_ratio > 1)) {
    throw DataError("corpus.max_ratio must exceed 1 (or be 0 to disable)");
  }
  if (config.split.n_test < 1) throw DataError("split.n_test must be at least 1");
  if (config.split.oversample_factor < 1) throw DataError("split.oversample must be at least 1");
  if (config.lexicon_enabled) {
    if (config.lexicon_table.empty()) {
      throw DataError("lexicon.table is required when lexicon.enabled is true");
    }
    if (!std::filesystem::exists(config.lexicon_table)) {
      throw DataError("lexicon table does not exist: " + config.lexicon_table);
    }
  }
  if (config.vocab_max_size <= Vocabulary::kNumSpecials) {
    throw DataError("vocab.max_size must exceed " + std::to_string(Vocabulary::kNumSpecials));
  }
  if (config.embed_dim < 1) throw DataError("model.embed_dim must be at least 1");
  if (config.hidden_dim < 1) throw DataError("model.hidden_dim must be at least 1");
  if (config.bleu_max_n < 1 || config.bleu_max_n > 9) {
    throw DataError("bleu.max_n must be between 1 and 9");
  }
  validate(config.train);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  PipelineConfig config = parse_config(text);
  validate_config(config);
  return config;
}

std::string serialize_config(const PipelineConfig& config) {
  std::ostringstream out;
  out << "[paths]\n";
  out << "source_xml = " << config.source_xml << "\n";
  out << "target_xml = " << config.target_xml << "\n";
  out << "work_dir = " << config.work_dir << "\n";
  out << "\n[corpus]\n";
  out << "source_language = " << config.source_language << "\n";
  out << "target_language = " << config.target_language << "\n";
  out << "books = ";
  bool first = true;
  for (const std::string& book : config.books) {
    if (!first) out << ",";
    out << book;
    first = false;
  }
  out << "\n";
  out << "dedup = " << (config.dedup ? "true" : "false") << "\n";
  out << "max_ratio = " << fmt_real(config.max_ratio) << "\n";
  out << "\n[split]\n";
  out << "n_test = " << config.split.n_test << "\n";
  out << "n_val = " << config.split.n_val << "\n";
  out << "seed = " << config.split.seed << "\n";
  out << "oversample = " << config.split.oversample_factor << "\n";
  out << "\n[lexicon]\n";
  out << "enabled = " << (config.lexicon_enabled ? "true" : "false") << "\n";
  out << "table = " << config.lexicon_table << "\n";
  out << "top_k = " << config.lexicon_top_k << "\n";
  out << "stopwords = " << config.stopwords_path << "\n";
  out << "\n[vocab]\n";
  out << "max_size = " << config.vocab_max_size << "\n";
  out << "min_count = " << config.vocab_min_count << "\n";
  out << "\n[model]\n";
  out << "embed_dim = " << config.embed_dim << "\n";
  out << "hidden_dim = " << config.hidden_dim << "\n";
  out << "attention = " << (config.attention ? "true" : "false") << "\n";
  out << "\n[train]\n";
  out << "learning_rate = " << fmt_real(static_cast<double>(config.train.learning_rate)) << "\n";
  out << "clip_norm = " << fmt_real(static_cast<double>(config.train.clip_norm)) << "\n";
  out << "max_steps = " << config.train.max_steps << "\n";
  out << "report_every = " << config.train.report_every << "\n";
  out << "stop_threshold = " << fmt_real(static_cast<double>(config.train.stop_threshold)) << "\n";
  out << "stop_patience = " << config.train.stop_patience << "\n";
  out << "seed = " << config.train.seed << "\n";
  out << "validation_bleu_every = " << config.train.validation_bleu_every << "\n";
  out << "decode_max_len = " << config.train.decode_max_len << "\n";
  out << "init_scale = " << fmt_real(static_cast<double>(config.train.init_scale)) << "\n";
  out << "\n[bleu]\n";
  out << "max_n = " << config.bleu_max_n << "\n";
  out << "smoothing = " << smoothing_name(config.bleu_smoothing) << "\n";
  return out.str();
}

}  // namespace versemt
