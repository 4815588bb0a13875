#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "subchar/eval.h"
#include "subchar/pipeline/config.h"

namespace subchar::pipeline {

/// A failure inside run_experiment, tagged with the stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ExperimentReport {
  std::size_t ingested = 0;
  std::size_t dropped_empty = 0;
  std::size_t train_pairs = 0;  // after length filtering
  std::size_t dev_pairs = 0;
  std::size_t test_pairs = 0;
  std::size_t filtered_out = 0;
  std::size_t max_len = 0;
  std::size_t src_bpe_vocab = 0;  // 0 when the side has no BPE
  std::size_t tgt_bpe_vocab = 0;
  std::size_t src_vocab = 0;
  std::size_t tgt_vocab = 0;
  std::size_t parameters = 0;
  int64_t steps = 0;
  double final_loss = 0.0;
  std::optional<eval::BleuResult> test_bleu;  // absent when the test set is empty
  std::optional<eval::BleuResult> train_bleu;
  std::optional<double> train_accuracy;
  std::optional<eval::SignificanceResult> significance;
  double seconds = 0.0;
  std::string manifest_path;

  std::string json() const;
  std::string csv() const;
  std::string text() const;
};

/// ingest -> split -> length filter -> transform -> BPE -> vocab -> train ->
/// translate -> desegment/decode -> BLEU. Every intermediate file and a
/// manifest.json are written under config.out_dir.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Re-runs the configuration recorded in a manifest, optionally into another
/// output directory.
ExperimentReport rerun_manifest(const std::string& manifest_path, const std::string& out_dir = "",
                                std::ostream* log = nullptr);

ExperimentConfig config_from_manifest(const std::string& manifest_path);

}  // namespace subchar::pipeline
