#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subchar/nmt/model.h"
#include "subchar/nmt/network.h"
#include "subchar/text.h"

namespace subchar::nmt {

struct TrainConfig {
  double learning_rate = 1.0;
  int64_t total_steps = 250000;
  int batch_size = 128;
  double dropout = 0.2;
  uint64_t seed = 1;
  int max_src_len = 0;  // 0: no limit
  int max_tgt_len = 0;
  double clip_norm = 0.0;  // global gradient norm; 0 disables
  int64_t log_every = 100;

  void validate() const;
  /// Last step trained at the full rate, ceil(2/3 * total_steps).
  int64_t decay_step() const { return (2 * total_steps + 2) / 3; }
  /// Rate used by 1-based step `step`.
  double lr_at(int64_t step) const { return step > decay_step() ? learning_rate / 4.0 : learning_rate; }
};

struct LossPoint {
  int64_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<LossPoint> curve;
  int64_t steps = 0;
};

class DivergenceError : public Error {
 public:
  DivergenceError(int64_t step, double loss);
  int64_t step() const { return step_; }

 private:
  int64_t step_;
};

using LossCallback = std::function<void(const LossPoint&)>;

/// Plain SGD on mean token cross-entropy. Batches are drawn from a seeded
/// permutation of the corpus, reshuffled when fewer than a batch remain.
TrainResult train(Seq2SeqModel& model, const std::vector<Example>& corpus, const TrainConfig& config,
                  const LossCallback& on_log = {});

/// One SGD step on `batch`; returns the batch loss before the update.
double sgd_step(Seq2SeqModel& model, std::span<const Example> batch, double lr, const Dropout* dropout,
                double clip_norm);

/// Fraction of target tokens (end-of-sentence included) predicted by argmax
/// under teacher forcing.
double token_accuracy(const Seq2SeqModel& model, const std::vector<Example>& corpus);

double gradient_norm(const Seq2SeqModel& grad);

}  // namespace subchar::nmt
