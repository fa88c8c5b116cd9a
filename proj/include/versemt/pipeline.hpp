#pragma once

#include <iosfwd>

#include "versemt/bleu.hpp"
#include "versemt/config.hpp"
#include "versemt/trainer.hpp"

namespace versemt {

struct PipelineResult {
  BleuReport report;
  TrainStatus train_status = TrainStatus::ok;
  std::string message;  // set when training halted on a numeric failure
};

// Runs every stage into config.work_dir: effective_config.ini, aligned
// corpus files, optional substituted corpus, train/val/test splits,
// vocabularies, training_log.json, model.ckpt, test.hyp.txt, test.ref.txt,
// and eval.json. Progress lines go to diag. Rerunning with the same config
// reproduces every artifact byte for byte.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& diag);

// Greedy-decodes each source sentence with shared read-only params; output
// slots are independent, so worker count never changes the result.
std::vector<Tokens> decode_corpus(const std::vector<EncodedSentence>& sources,
                                  const ModelParams& params, const Vocabulary& tgt_vocab,
                                  std::size_t max_len);

}  // namespace versemt
