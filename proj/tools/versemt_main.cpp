#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "versemt/bleu.hpp"
#include "versemt/config.hpp"
#include "versemt/corpus.hpp"
#include "versemt/errors.hpp"
#include "versemt/lexicon.hpp"
#include "versemt/pipeline.hpp"
#include "versemt/sampling.hpp"
#include "versemt/trainer.hpp"
#include "versemt/vocab.hpp"

using namespace versemt;

namespace {

// Exit codes: 0 success, 1 usage, 2 data/validation, 3 numeric failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// One whitespace-tokenized sentence per line; empty lines stay empty.
std::vector<Tokens> read_token_lines(const std::filesystem::path& path) {
  std::vector<Tokens> out;
  for (const std::string& line : read_lines(path)) out.push_back(tokenize(line));
  return out;
}

void write_token_lines(const std::filesystem::path& path, const std::vector<Tokens>& lines) {
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

std::set<std::string> parse_book_list(const std::string& value) {
  std::set<std::string> books;
  std::stringstream stream{value};
  std::string item;
  while (std::getline(stream, item, ',')) {
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (!item.empty()) books.insert(item);
  }
  return books;
}

void write_corpus_files(const ParallelCorpus& corpus, const std::filesystem::path& dir,
                        const std::string& stem) {
  std::filesystem::create_directories(dir);
  write_parallel(corpus, dir / (stem + ".src.txt"), dir / (stem + ".tgt.txt"),
                 dir / (stem + ".index.tsv"));
}

struct IngestArgs {
  std::string source_xml, target_xml, out_dir;
  std::string stem = "corpus";
  std::string source_lang = "src", target_lang = "tgt";
  std::string books;
  bool no_dedup = false;
  double max_ratio = 0;
};

int cmd_ingest(const IngestArgs& args) {
  MonolingualDocument src = parse_bible_xml(read_file(args.source_xml), args.source_lang);
  MonolingualDocument tgt = parse_bible_xml(read_file(args.target_xml), args.target_lang);
  ParallelCorpus corpus = build_parallel(src, tgt, parse_book_list(args.books));
  std::cerr << "aligned " << corpus.size() << " verse pairs\n";
  if (!args.no_dedup) {
    const std::size_t before = corpus.size();
    corpus = dedup_pairs(corpus);
    std::cerr << "dedup removed " << before - corpus.size() << " pairs\n";
  }
  std::filesystem::create_directories(args.out_dir);
  if (args.max_ratio > 1) {
    const auto outliers = alignment_report(corpus, args.max_ratio);
    std::ofstream report(std::filesystem::path(args.out_dir) / "alignment_report.tsv",
                         std::ios::binary | std::ios::trunc);
    report << "ref\tsource_len\ttarget_len\tratio\n";
    for (const AlignmentOutlier& o : outliers) {
      report << o.ref.str() << '\t' << o.source_len << '\t' << o.target_len << '\t'
             << format_score(o.ratio) << '\n';
    }
    std::cerr << outliers.size() << " length-ratio outliers above " << args.max_ratio << "\n";
  }
  write_corpus_files(corpus, args.out_dir, args.stem);
  return kExitOk;
}

struct SplitArgs {
  std::string src, tgt, index, out_dir;
  SplitSpec spec{0, 0, 1, 1};
};

int cmd_split(const SplitArgs& args) {
  ParallelCorpus corpus = read_parallel(args.src, args.tgt, args.index);
  SplitResult split = split_corpus(corpus, args.spec);
  write_corpus_files(split.train, args.out_dir, "train");
  write_corpus_files(split.val, args.out_dir, "val");
  write_corpus_files(split.test, args.out_dir, "test");
  std::cerr << "train " << split.train.size() << ", val " << split.val.size() << ", test "
            << split.test.size() << "\n";
  if (args.spec.oversample_factor > 1) {
    ParallelCorpus ovs = oversample(split.train, args.spec.oversample_factor);
    write_corpus_files(ovs, args.out_dir, "train_ovs");
    std::cerr << "oversampled train x" << args.spec.oversample_factor << " = " << ovs.size()
              << " pairs\n";
  }
  return kExitOk;
}

struct MineArgs {
  std::string src, tgt, index, out;
  std::vector<std::string> tokens;
  std::size_t top_k = 10;
  std::string stopwords_path;
  bool no_stopwords = false;
};

int cmd_mine(const MineArgs& args) {
  ParallelCorpus corpus = read_parallel(args.src, args.tgt, args.index);
  std::unordered_set<std::string> stopwords;
  if (!args.no_stopwords) {
    if (args.stopwords_path.empty()) {
      stopwords = default_stopwords(corpus);
    } else {
      for (const std::string& line : read_lines(args.stopwords_path)) {
        for (const std::string& token : tokenize(line)) stopwords.insert(token);
      }
    }
  }
  std::vector<CandidateSet> sets;
  for (const std::string& token : args.tokens) {
    sets.push_back(mine_candidates(corpus, token, args.top_k, stopwords));
    std::cerr << token << ": " << sets.back().candidates.size() << " candidates, "
              << sets.back().none_count << " pairs without any\n";
  }
  save_candidates(sets, args.out);
  return kExitOk;
}

struct ReviewArgs {
  std::string candidates, out;
  std::string default_mode = "verb_canonical";
  bool non_interactive = false;
};

int cmd_review(const ReviewArgs& args) {
  std::vector<CandidateSet> sets = load_candidates(args.candidates);
  ReviewOptions options;
  options.interactive = !args.non_interactive;
  options.default_mode = rule_mode_from_name(args.default_mode);
  SubstitutionTable table = review_candidates(sets, std::cin, std::cerr, options);
  table.save(args.out);
  if (table.aborted) {
    std::cerr << "review aborted; wrote partial table (" << table.rules.size()
              << " rules)\n";
  } else {
    std::cerr << "wrote " << table.rules.size() << " rules\n";
  }
  return kExitOk;
}

struct ApplyArgs {
  std::string table, src, tgt, index, out_dir;
  std::string stem = "corpus.subst";
};

int cmd_apply(const ApplyArgs& args) {
  SubstitutionTable table = SubstitutionTable::load(args.table);
  ParallelCorpus corpus = read_parallel(args.src, args.tgt, args.index);
  ParallelCorpus substituted = apply_table(corpus, table);
  write_corpus_files(substituted, args.out_dir, args.stem);
  std::cerr << "applied " << table.rules.size() << " rules to " << corpus.size()
            << " pairs\n";
  return kExitOk;
}

struct TrainArgs {
  std::string train_src, train_tgt, train_index;
  std::string val_src, val_tgt, val_index;
  std::string out_dir;
  std::size_t vocab_max_size = 50000;
  std::size_t vocab_min_count = 1;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  bool attention = false;
  TrainConfig config;
};

int cmd_train(const TrainArgs& args) {
  ParallelCorpus train = read_parallel(args.train_src, args.train_tgt, args.train_index);
  ParallelCorpus val;
  if (args.val_src.empty() != args.val_tgt.empty()) {
    throw DataError("--val-src and --val-tgt must be given together");
  }
  if (!args.val_src.empty()) {
    val = read_parallel(args.val_src, args.val_tgt, args.val_index);
  }
  std::vector<Tokens> src_side, tgt_side;
  for (const SentencePair& pair : train.pairs) {
    src_side.push_back(pair.source);
    tgt_side.push_back(pair.target);
  }
  Vocabulary src_vocab = Vocabulary::build(src_side, args.vocab_max_size, args.vocab_min_count);
  Vocabulary tgt_vocab = Vocabulary::build(tgt_side, args.vocab_max_size, args.vocab_min_count);
  ModelDims dims{src_vocab.size(), tgt_vocab.size(), args.embed_dim, args.hidden_dim};

  TrainResult result = run_training(train, val, src_vocab, tgt_vocab, dims, args.attention,
                                    args.config);

  const std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);
  src_vocab.save(out_dir / "src.vocab");
  tgt_vocab.save(out_dir / "tgt.vocab");
  std::ofstream log(out_dir / "training_log.json", std::ios::binary | std::ios::trunc);
  log << log_to_json(result.log);
  log.close();
  save_checkpoint(result.params, src_vocab, tgt_vocab, result.steps_run,
                  out_dir / "model.ckpt");
  if (result.status != TrainStatus::ok) {
    std::cerr << "training halted at step " << result.steps_run << ": " << result.message
              << "\n";
    return kExitNumeric;
  }
  std::cerr << "trained " << result.steps_run << " steps";
  if (!result.log.records.empty()) std::cerr << ", last mean loss " << result.log.records.back().loss;
  std::cerr << "\n";
  return kExitOk;
}

struct TranslateArgs {
  std::string checkpoint, in, out;
  std::size_t max_len = 50;
};

int cmd_translate(const TranslateArgs& args) {
  Checkpoint ckpt = load_checkpoint(args.checkpoint);
  std::vector<EncodedSentence> sources;
  for (const std::string& line : read_lines(args.in)) {
    sources.push_back(ckpt.src_vocab.encode(tokenize(normalize_text(line))));
  }
  std::vector<Tokens> hyps = decode_corpus(sources, ckpt.params, ckpt.tgt_vocab, args.max_len);
  write_token_lines(args.out, hyps);
  std::cerr << "translated " << hyps.size() << " sentences\n";
  return kExitOk;
}

struct EvalArgs {
  std::string hyp, ref, per_sentence;
  int max_n = 4;
  std::string smoothing = "none";
  std::string sentence_smoothing = "add_one_high_order";
};

int cmd_eval(const EvalArgs& args) {
  std::vector<Tokens> hyps = read_token_lines(args.hyp);
  std::vector<Tokens> refs = read_token_lines(args.ref);
  BleuReport report = corpus_bleu(hyps, refs, args.max_n, smoothing_from_name(args.smoothing));
  std::cout << format_report(report);
  if (!args.per_sentence.empty()) {
    std::ofstream out(args.per_sentence, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + args.per_sentence + " for writing");
    const Smoothing mode = smoothing_from_name(args.sentence_smoothing);
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      out << i + 1 << '\t' << format_score(sentence_bleu(hyps[i], refs[i], args.max_n, mode).score)
          << '\n';
    }
  }
  return kExitOk;
}

struct PipelineArgs {
  std::string config_path;
  std::string work_dir;
  std::uint64_t seed = 0;
  std::size_t max_steps = 0;
  std::string lexicon_table;
  std::string smoothing;
  bool attention = false;
  bool no_attention = false;
  bool no_lexicon = false;
  // set by the parser when the matching flag appeared
  bool has_work_dir = false, has_seed = false, has_max_steps = false, has_smoothing = false;
};

int cmd_pipeline(const PipelineArgs& args) {
  PipelineConfig config = load_config(args.config_path);
  if (args.has_work_dir) config.work_dir = args.work_dir;
  if (args.has_seed) {
    config.split.seed = args.seed;
    config.train.seed = args.seed;
  }
  if (args.has_max_steps) config.train.max_steps = args.max_steps;
  if (args.attention) config.attention = true;
  if (args.no_attention) config.attention = false;
  if (!args.lexicon_table.empty()) {
    config.lexicon_enabled = true;
    config.lexicon_table = args.lexicon_table;
  }
  if (args.no_lexicon) config.lexicon_enabled = false;
  if (args.has_smoothing) config.bleu_smoothing = smoothing_from_name(args.smoothing);
  validate_config(config);

  PipelineResult result = run_pipeline(config, std::cerr);
  if (result.train_status != TrainStatus::ok) {
    std::cerr << "pipeline halted on a numeric failure: " << result.message << "\n";
    return kExitNumeric;
  }
  std::cout << format_report(result.report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verse-aligned machine translation toolkit"};
  app.require_subcommand(1);

  IngestArgs ingest;
  CLI::App* c_ingest = app.add_subcommand("ingest", "parse two verse XML files into an aligned corpus");
  c_ingest->add_option("--source-xml", ingest.source_xml, "source-language XML file")->required();
  c_ingest->add_option("--target-xml", ingest.target_xml, "target-language XML file")->required();
  c_ingest->add_option("--out-dir", ingest.out_dir, "output directory")->required();
  c_ingest->add_option("--stem", ingest.stem, "output file stem (default corpus)");
  c_ingest->add_option("--source-lang", ingest.source_lang, "source language tag");
  c_ingest->add_option("--target-lang", ingest.target_lang, "target language tag");
  c_ingest->add_option("--books", ingest.books, "comma-separated book codes to keep (default all)");
  c_ingest->add_flag("--no-dedup", ingest.no_dedup, "keep duplicate sentence pairs");
  c_ingest->add_option("--max-ratio", ingest.max_ratio,
                       "write alignment_report.tsv for pairs above this length ratio");

  SplitArgs split;
  CLI::App* c_split = app.add_subcommand("split", "random train/val/test split of a corpus");
  c_split->add_option("--src", split.src, "source text file")->required();
  c_split->add_option("--tgt", split.tgt, "target text file")->required();
  c_split->add_option("--index", split.index, "verse index file");
  c_split->add_option("--out-dir", split.out_dir, "output directory")->required();
  c_split->add_option("--n-test", split.spec.n_test, "test pair count")->required();
  c_split->add_option("--n-val", split.spec.n_val, "validation pair count")->required();
  c_split->add_option("--seed", split.spec.seed, "split seed (default 1)");
  c_split->add_option("--oversample", split.spec.oversample_factor,
                      "also write train_ovs.* duplicated this many times");

  CLI::App* c_lexicon = app.add_subcommand("lexicon", "substitution table workflow");
  c_lexicon->require_subcommand(1);

  MineArgs mine;
  CLI::App* c_mine = c_lexicon->add_subcommand("mine", "rank candidate translations for source tokens");
  c_mine->add_option("--src", mine.src, "source text file")->required();
  c_mine->add_option("--tgt", mine.tgt, "target text file")->required();
  c_mine->add_option("--index", mine.index, "verse index file");
  c_mine->add_option("--token", mine.tokens, "source token to mine (repeatable)")->required();
  c_mine->add_option("--top-k", mine.top_k, "candidates kept per token (default 10)");
  c_mine->add_option("--stopwords", mine.stopwords_path, "stopword file, one token per line");
  c_mine->add_flag("--no-stopwords", mine.no_stopwords, "disable the default stopword filter");
  c_mine->add_option("--out", mine.out, "candidate file to write")->required();

  ReviewArgs review;
  CLI::App* c_review = c_lexicon->add_subcommand("review", "interactively turn candidates into rules");
  c_review->add_option("--candidates", review.candidates, "candidate file from mine")->required();
  c_review->add_option("--out", review.out, "substitution table to write")->required();
  c_review->add_option("--default-mode", review.default_mode,
                       "mode offered at each prompt (name_copy|verb_canonical)");
  c_review->add_flag("--non-interactive", review.non_interactive, "accept every default");

  ApplyArgs apply;
  CLI::App* c_apply = c_lexicon->add_subcommand("apply", "apply a substitution table to a corpus");
  c_apply->add_option("--table", apply.table, "substitution table file")->required();
  c_apply->add_option("--src", apply.src, "source text file")->required();
  c_apply->add_option("--tgt", apply.tgt, "target text file")->required();
  c_apply->add_option("--index", apply.index, "verse index file");
  c_apply->add_option("--out-dir", apply.out_dir, "output directory")->required();
  c_apply->add_option("--stem", apply.stem, "output file stem (default corpus.subst)");

  TrainArgs train;
  CLI::App* c_train = app.add_subcommand("train", "train a model on an aligned corpus");
  c_train->add_option("--train-src", train.train_src, "training source text")->required();
  c_train->add_option("--train-tgt", train.train_tgt, "training target text")->required();
  c_train->add_option("--train-index", train.train_index, "training verse index");
  c_train->add_option("--val-src", train.val_src, "validation source text");
  c_train->add_option("--val-tgt", train.val_tgt, "validation target text");
  c_train->add_option("--val-index", train.val_index, "validation verse index");
  c_train->add_option("--out-dir", train.out_dir, "output directory")->required();
  c_train->add_option("--vocab-max-size", train.vocab_max_size, "vocabulary cap (default 50000)");
  c_train->add_option("--vocab-min-count", train.vocab_min_count, "minimum token count (default 1)");
  c_train->add_option("--embed-dim", train.embed_dim, "embedding width (default 64)");
  c_train->add_option("--hidden-dim", train.hidden_dim, "hidden state width (default 64)");
  c_train->add_flag("--attention", train.attention, "enable dot-product attention");
  c_train->add_option("--learning-rate", train.config.learning_rate, "SGD step size (default 0.05)");
  c_train->add_option("--clip-norm", train.config.clip_norm, "global gradient norm cap (default 5)");
  c_train->add_option("--max-steps", train.config.max_steps, "hard step limit (default 25000)");
  c_train->add_option("--report-every", train.config.report_every, "steps between loss records");
  c_train->add_option("--stop-threshold", train.config.stop_threshold,
                      "loss level for the stopping rule (default 2.0)");
  c_train->add_option("--stop-patience", train.config.stop_patience,
                      "consecutive sub-threshold reports required (default 5)");
  c_train->add_option("--seed", train.config.seed, "initialization and shuffle seed");
  c_train->add_option("--validation-bleu-every", train.config.validation_bleu_every,
                      "steps between validation BLEU records (0 disables)");
  c_train->add_option("--decode-max-len", train.config.decode_max_len,
                      "greedy decode length cap (default 50)");
  c_train->add_option("--init-scale", train.config.init_scale,
                      "uniform init half-width (default 0.08)");

  TranslateArgs translate;
  CLI::App* c_translate = app.add_subcommand("translate", "greedy-decode one sentence per line");
  c_translate->add_option("--checkpoint", translate.checkpoint, "model checkpoint")->required();
  c_translate->add_option("--in", translate.in, "source sentences, one per line")->required();
  c_translate->add_option("--out", translate.out, "hypothesis file to write")->required();
  c_translate->add_option("--max-len", translate.max_len, "decode length cap (default 50)");

  EvalArgs eval;
  CLI::App* c_eval = app.add_subcommand("eval", "corpus BLEU of a hypothesis file against a reference");
  c_eval->add_option("--hyp", eval.hyp, "hypothesis file, one sentence per line")->required();
  c_eval->add_option("--ref", eval.ref, "reference file, line-aligned")->required();
  c_eval->add_option("--max-n", eval.max_n, "highest n-gram order (default 4)");
  c_eval->add_option("--smoothing", eval.smoothing, "corpus smoothing: none|add_one_high_order");
  c_eval->add_option("--per-sentence", eval.per_sentence, "write per-line sentence BLEU TSV here");
  c_eval->add_option("--sentence-smoothing", eval.sentence_smoothing,
                     "smoothing for --per-sentence (default add_one_high_order)");

  PipelineArgs pipeline;
  CLI::App* c_pipeline = app.add_subcommand("pipeline", "run every stage from a config file");
  c_pipeline->add_option("--config", pipeline.config_path, "pipeline config file")->required();
  CLI::Option* o_work = c_pipeline->add_option("--work-dir", pipeline.work_dir, "override paths.work_dir");
  CLI::Option* o_seed = c_pipeline->add_option("--seed", pipeline.seed,
                                               "override both split.seed and train.seed");
  CLI::Option* o_steps = c_pipeline->add_option("--max-steps", pipeline.max_steps,
                                                "override train.max_steps");
  c_pipeline->add_flag("--attention", pipeline.attention, "force attention on");
  c_pipeline->add_flag("--no-attention", pipeline.no_attention, "force attention off");
  c_pipeline->add_option("--lexicon-table", pipeline.lexicon_table,
                         "enable substitution with this table");
  c_pipeline->add_flag("--no-lexicon", pipeline.no_lexicon, "disable substitution");
  CLI::Option* o_smooth = c_pipeline->add_option("--smoothing", pipeline.smoothing,
                                                 "override bleu.smoothing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  pipeline.has_work_dir = o_work->count() > 0;
  pipeline.has_seed = o_seed->count() > 0;
  pipeline.has_max_steps = o_steps->count() > 0;
  pipeline.has_smoothing = o_smooth->count() > 0;

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest);
    if (c_split->parsed()) return cmd_split(split);
    if (c_mine->parsed()) return cmd_mine(mine);
    if (c_review->parsed()) return cmd_review(review);
    if (c_apply->parsed()) return cmd_apply(apply);
    if (c_train->parsed()) return cmd_train(train);
    if (c_translate->parsed()) return cmd_translate(translate);
    if (c_eval->parsed()) return cmd_eval(eval);
    if (c_pipeline->parsed()) return cmd_pipeline(pipeline);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const versemt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
