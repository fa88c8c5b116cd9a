#include "versemt/trainer.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "versemt/bleu.hpp"
#include "versemt/errors.hpp"
#include "versemt/rng.hpp"

namespace versemt {

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0)) throw DataError("learning_rate must be positive");
  if (config.max_steps < 1) throw DataError("max_steps must be at least 1");
  if (config.report_every < 1) throw DataError("report_every must be at least 1");
  if (config.stop_patience < 1) throw DataError("stop_patience must be at least 1");
  if (!(config.stop_threshold > 0)) throw DataError("stop_threshold must be positive");
  if (config.decode_max_len < 1) throw DataError("decode_max_len must be at least 1");
  if (!(config.init_scale > 0)) throw DataError("init_scale must be positive");
}

std::string log_to_json(const TrainingLog& log) {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const LossRecord& r : log.records) {
    j["records"].push_back({{"step", r.step}, {"loss", r.loss}});
  }
  j["bleu_records"] = nlohmann::json::array();
  for (const BleuRecord& r : log.bleu_records) {
    j["bleu_records"].push_back({{"step", r.step}, {"bleu", r.bleu}});
  }
  return j.dump(2) + "\n";
}

TrainingLog log_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("training log is not valid JSON: ") + e.what());
  }
  TrainingLog log;
  try {
    for (const auto& r : j.at("records")) {
      log.records.push_back({r.at("step").get<std::size_t>(), r.at("loss").get<real>()});
    }
    for (const auto& r : j.at("bleu_records")) {
      log.bleu_records.push_back({r.at("step").get<std::size_t>(), r.at("bleu").get<real>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed training log: ") + e.what());
  }
  return log;
}

bool should_stop(const TrainingLog& log, const TrainConfig& config) {
  if (!log.records.empty() && log.records.back().step >= config.max_steps) return true;
  if (log.records.size() < config.stop_patience) return false;
  for (std::size_t i = log.records.size() - config.stop_patience; i < log.records.size(); ++i) {
    if (!(log.records[i].loss < config.stop_threshold)) return false;
  }
  return true;
}

namespace {

real validation_bleu(const ModelParams& params, const std::vector<EncodedSentence>& val_src,
                     const std::vector<Tokens>& val_refs, const Vocabulary& tgt_vocab,
                     std::size_t decode_max_len) {
  std::vector<Tokens> hyps(val_src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(val_src.size()); ++i) {
    hyps[i] = tgt_vocab.decode(greedy_decode(val_src[i], params, decode_max_len));
  }
  return static_cast<real>(corpus_bleu(hyps, val_refs).score);
}

}  // namespace

TrainResult run_training(const ParallelCorpus& train, const ParallelCorpus& val,
                         const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
                         const ModelDims& dims, bool attention,
                         const TrainConfig& config) {
  validate(config);
  if (train.empty()) throw DataError("training corpus is empty");
  ModelDims full = dims;
  if (full.src_vocab == 0) full.src_vocab = src_vocab.size();
  if (full.tgt_vocab == 0) full.tgt_vocab = tgt_vocab.size();
  if (full.src_vocab != src_vocab.size() || full.tgt_vocab != tgt_vocab.size()) {
    throw DataError("model dims disagree with vocabulary sizes");
  }

  std::vector<std::pair<EncodedSentence, EncodedSentence>> encoded;
  encoded.reserve(train.size());
  for (const SentencePair& pair : train.pairs) {
    encoded.emplace_back(src_vocab.encode(pair.source), tgt_vocab.encode(pair.target));
  }
  std::vector<EncodedSentence> val_src;
  std::vector<Tokens> val_refs;
  for (const SentencePair& pair : val.pairs) {
    val_src.push_back(src_vocab.encode(pair.source));
    val_refs.push_back(pair.target);
  }

  TrainResult result;
  result.params = init_params(full, config.seed, config.init_scale, attention);
  Rng shuffle_rng(config.seed);
  std::vector<std::size_t> order(encoded.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t step = 0;
  double loss_sum = 0;
  std::size_t loss_count = 0;
  bool done = false;
  while (!done) {
    shuffle_rng.shuffle(order);
    for (std::size_t idx : order) {
      ForwardTrace trace = forward(encoded[idx].first, encoded[idx].second, result.params);
      Gradients grads = backward(trace, result.params);
      try {
        sgd_step(result.params, grads, config.learning_rate, config.clip_norm);
      } catch (const NumericError& e) {
        result.status = TrainStatus::numeric_error;
        result.message = e.what();
        result.steps_run = step;
        return result;
      }
      ++step;
      loss_sum += static_cast<double>(trace.loss);
      ++loss_count;

      if (step % config.report_every == 0) {
        result.log.records.push_back(
            {step, static_cast<real>(loss_sum / static_cast<double>(loss_count))});
        loss_sum = 0;
        loss_count = 0;
      }
      if (config.validation_bleu_every > 0 && step % config.validation_bleu_every == 0 &&
          !val_src.empty()) {
        result.log.bleu_records.push_back(
            {step, validation_bleu(result.params, val_src, val_refs, tgt_vocab,
                                   config.decode_max_len)});
      }
      if (step >= config.max_steps || should_stop(result.log, config)) {
        done = true;
        break;
      }
    }
  }
  result.steps_run = step;
  return result;
}

namespace {

constexpr char kMagic[8] = {'V', 'M', 'T', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_vocab(std::string& out, const Vocabulary& vocab) {
  put_u64(out, vocab.size() - Vocabulary::kNumSpecials);
  for (std::size_t i = Vocabulary::kNumSpecials; i < vocab.size(); ++i) {
    const std::string& token = vocab.token_at(static_cast<std::uint32_t>(i));
    put_u32(out, static_cast<std::uint32_t>(token.size()));
    out.append(token);
  }
}

// Bounds-checked sequential reader; overruns mean a truncated file.
class Reader {
public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }

  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint file truncated");
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::uint32_t u32() {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(take(4));
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(take(8));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str(std::size_t n) { return std::string(take(n), n); }

private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

Vocabulary read_vocab(Reader& reader) {
  const std::uint64_t count = reader.u64();
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t len = reader.u32();
    tokens.push_back(reader.str(len));
  }
  return Vocabulary::from_tokens(tokens);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const Vocabulary& src_vocab,
                     const Vocabulary& tgt_vocab, std::uint64_t step,
                     const std::filesystem::path& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, params.attention ? 1 : 0);
  put_u64(out, params.dims.src_vocab);
  put_u64(out, params.dims.tgt_vocab);
  put_u64(out, params.dims.embed_dim);
  put_u64(out, params.dims.hidden_dim);
  put_u32(out, Vocabulary::kPad);
  put_u32(out, Vocabulary::kUnk);
  put_u32(out, Vocabulary::kBos);
  put_u32(out, Vocabulary::kEos);
  put_u64(out, step);
  put_vocab(out, src_vocab);
  put_vocab(out, tgt_vocab);
  visit_arrays(params, [&](const char*, const Vector& values) {
    put_u64(out, values.size());
    for (real v : values) put_f64(out, static_cast<double>(v));
  });
  put_u64(out, fnv1a(out));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  Reader reader(bytes);
  const char* magic = reader.take(sizeof(kMagic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(CheckpointError::Kind::bad_magic, "not a checkpoint file");
  }
  const std::uint32_t version = reader.u32();
  if (version != kFormatVersion) {
    throw CheckpointError(CheckpointError::Kind::version_mismatch,
                          "checkpoint format version " + std::to_string(version) +
                              ", expected " + std::to_string(kFormatVersion));
  }

  Checkpoint ckpt;
  const bool attention = reader.u32() != 0;
  ModelDims dims;
  dims.src_vocab = reader.u64();
  dims.tgt_vocab = reader.u64();
  dims.embed_dim = reader.u64();
  dims.hidden_dim = reader.u64();
  for (std::uint32_t expected = 0; expected < Vocabulary::kNumSpecials; ++expected) {
    if (reader.u32() != expected) {
      throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                            "unexpected special token layout");
    }
  }
  ckpt.step = reader.u64();
  ckpt.src_vocab = read_vocab(reader);
  ckpt.tgt_vocab = read_vocab(reader);

  // A garbled header cannot describe more floats than the file holds; reject
  // it before sizing any allocation by it.
  const double param_bytes =
      8.0 * (static_cast<double>(dims.src_vocab + dims.tgt_vocab) * dims.embed_dim +
             2.0 * dims.hidden_dim * (dims.embed_dim + dims.hidden_dim + 1) +
             static_cast<double>(dims.tgt_vocab) *
                 ((attention ? 2.0 : 1.0) * dims.hidden_dim + 1));
  if (param_bytes > static_cast<double>(bytes.size())) {
    throw CheckpointError(CheckpointError::Kind::truncated,
                          "checkpoint smaller than its header requires");
  }

  ckpt.params = init_params(dims, 0, real(1), attention);  // shapes; overwritten below
  visit_arrays(ckpt.params, [&](const char* name, Vector& values) {
    const std::uint64_t count = reader.u64();
    if (count != values.size()) {
      throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                            std::string("array size mismatch for ") + name);
    }
    for (real& v : values) v = static_cast<real>(reader.f64());
  });

  const std::size_t body_end = reader.pos();
  const std::uint64_t stored = reader.u64();
  if (reader.pos() != bytes.size()) {
    throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                          "trailing bytes after checksum");
  }
  if (stored != fnv1a(bytes.substr(0, body_end))) {
    throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                          "checkpoint checksum mismatch");
  }
  if (ckpt.src_vocab.size() != dims.src_vocab || ckpt.tgt_vocab.size() != dims.tgt_vocab) {
    throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                          "vocabulary sizes disagree with header dims");
  }
  return ckpt;
}

}  // namespace versemt
