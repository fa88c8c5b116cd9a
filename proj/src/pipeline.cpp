#include "versemt/pipeline.hpp"

#include <fstream>
#include <ostream>

#include "versemt/corpus.hpp"
#include "versemt/errors.hpp"
#include "versemt/lexicon.hpp"
#include "versemt/sampling.hpp"

namespace versemt {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_lines(const std::filesystem::path& path, const std::vector<Tokens>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Tokens& tokens : lines) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << tokens[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& dir,
                  const std::string& stem) {
  write_parallel(corpus, dir / (stem + ".src.txt"), dir / (stem + ".tgt.txt"),
                 dir / (stem + ".index.tsv"));
}

}  // namespace

std::vector<Tokens> decode_corpus(const std::vector<EncodedSentence>& sources,
                                  const ModelParams& params, const Vocabulary& tgt_vocab,
                                  std::size_t max_len) {
  std::vector<Tokens> hyps(sources.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(sources.size()); ++i) {
    hyps[i] = tgt_vocab.decode(greedy_decode(sources[i], params, max_len));
  }
  return hyps;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& diag) {
  const std::filesystem::path work_dir(config.work_dir);
  std::filesystem::create_directories(work_dir);
  write_file(work_dir / "effective_config.ini", serialize_config(config));

  diag << "ingest: parsing " << config.source_xml << " and " << config.target_xml << "\n";
  MonolingualDocument src_doc = parse_bible_xml(read_file(config.source_xml),
                                                config.source_language);
  MonolingualDocument tgt_doc = parse_bible_xml(read_file(config.target_xml),
                                                config.target_language);
  ParallelCorpus corpus = build_parallel(src_doc, tgt_doc, config.books);
  diag << "ingest: " << corpus.size() << " aligned pairs\n";
  if (config.dedup) {
    const std::size_t before = corpus.size();
    corpus = dedup_pairs(corpus);
    diag << "ingest: dedup removed " << before - corpus.size() << " pairs\n";
  }
  if (config.max_ratio > 1) {
    const auto outliers = alignment_report(corpus, config.max_ratio);
    std::string report = "ref\tsource_len\ttarget_len\tratio\n";
    for (const AlignmentOutlier& o : outliers) {
      report += o.ref.str() + "\t" + std::to_string(o.source_len) + "\t" +
                std::to_string(o.target_len) + "\t" + format_score(o.ratio) + "\n";
    }
    write_file(work_dir / "alignment_report.tsv", report);
    diag << "ingest: " << outliers.size() << " length-ratio outliers\n";
  }
  write_corpus(corpus, work_dir, "corpus");

  if (config.lexicon_enabled) {
    SubstitutionTable table = SubstitutionTable::load(config.lexicon_table);
    corpus = apply_table(corpus, table);
    write_corpus(corpus, work_dir, "corpus.subst");
    diag << "lexicon: applied " << table.rules.size() << " rules\n";
  }

  SplitResult split = split_corpus(corpus, config.split);
  write_corpus(split.train, work_dir, "train");
  write_corpus(split.val, work_dir, "val");
  write_corpus(split.test, work_dir, "test");
  ParallelCorpus train = oversample(split.train, config.split.oversample_factor);
  diag << "split: train " << split.train.size() << " (x" << config.split.oversample_factor
       << " = " << train.size() << "), val " << split.val.size() << ", test "
       << split.test.size() << "\n";

  std::vector<Tokens> train_src, train_tgt;
  train_src.reserve(train.size());
  train_tgt.reserve(train.size());
  for (const SentencePair& pair : train.pairs) {
    train_src.push_back(pair.source);
    train_tgt.push_back(pair.target);
  }
  Vocabulary src_vocab = Vocabulary::build(train_src, config.vocab_max_size,
                                           config.vocab_min_count);
  Vocabulary tgt_vocab = Vocabulary::build(train_tgt, config.vocab_max_size,
                                           config.vocab_min_count);
  src_vocab.save(work_dir / "src.vocab");
  tgt_vocab.save(work_dir / "tgt.vocab");
  diag << "vocab: source " << src_vocab.size() << ", target " << tgt_vocab.size() << "\n";

  ModelDims dims{src_vocab.size(), tgt_vocab.size(), config.embed_dim, config.hidden_dim};
  diag << "train: up to " << config.train.max_steps << " steps\n";
  TrainResult trained = run_training(train, split.val, src_vocab, tgt_vocab, dims,
                                     config.attention, config.train);
  write_file(work_dir / "training_log.json", log_to_json(trained.log));
  save_checkpoint(trained.params, src_vocab, tgt_vocab, trained.steps_run,
                  work_dir / "model.ckpt");
  PipelineResult result;
  result.train_status = trained.status;
  result.message = trained.message;
  if (trained.status != TrainStatus::ok) {
    diag << "train: halted at step " << trained.steps_run << ": " << trained.message << "\n";
    return result;
  }
  diag << "train: finished after " << trained.steps_run << " steps";
  if (!trained.log.records.empty()) {
    diag << ", last mean loss " << trained.log.records.back().loss;
  }
  diag << "\n";

  std::vector<EncodedSentence> test_src;
  std::vector<Tokens> test_refs;
  for (const SentencePair& pair : split.test.pairs) {
    test_src.push_back(src_vocab.encode(pair.source));
    test_refs.push_back(pair.target);
  }
  std::vector<Tokens> hyps = decode_corpus(test_src, trained.params, tgt_vocab,
                                           config.train.decode_max_len);
  write_lines(work_dir / "test.hyp.txt", hyps);
  write_lines(work_dir / "test.ref.txt", test_refs);

  result.report = corpus_bleu(hyps, test_refs, config.bleu_max_n, config.bleu_smoothing);
  write_file(work_dir / "eval.json", format_report(result.report));
  diag << "eval: BLEU " << format_score(result.report.score) << " on " << hyps.size()
       << " test sentences\n";
  return result;
}

}  // namespace versemt
