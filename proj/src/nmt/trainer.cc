#include "subchar/nmt/trainer.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "subchar/random.h"

namespace subchar::nmt {

namespace {

std::string divergence_message(int64_t step, double loss) {
  std::ostringstream os;
  os << "training diverged at step " << step << ": loss " << loss;
  return os.str();
}

std::vector<Mat*> tensors(Seq2SeqModel& m) {
  std::vector<Mat*> out;
  m.visit([&](const std::string&, Mat& p) { out.push_back(&p); });
  return out;
}

}  // namespace

DivergenceError::DivergenceError(int64_t step, double loss)
    : Error(divergence_message(step, loss)), step_(step) {}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (total_steps < 0) throw Error("total_steps must be non-negative");
  if (batch_size <= 0) throw Error("batch_size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("dropout must be in [0, 1)");
  if (max_src_len < 0 || max_tgt_len < 0) throw Error("max lengths must be non-negative");
  if (clip_norm < 0.0) throw Error("clip_norm must be non-negative");
  if (log_every <= 0) throw Error("log_every must be positive");
}

double gradient_norm(const Seq2SeqModel& grad) {
  double sq = 0.0;
  grad.visit([&](const std::string&, const Mat& g) { sq += g.squaredNorm(); });
  return std::sqrt(sq);
}

double sgd_step(Seq2SeqModel& model, std::span<const Example> batch, double lr, const Dropout* dropout,
                double clip_norm) {
  ForwardResult fr = forward(model, batch, dropout);
  if (!std::isfinite(fr.loss)) return fr.loss;
  Seq2SeqModel grad = backward(model, fr.cache);
  double scale = lr;
  if (clip_norm > 0.0) {
    const double norm = gradient_norm(grad);
    if (norm > clip_norm) scale *= clip_norm / norm;
  }
  auto params = tensors(model);
  auto grads = tensors(grad);
  for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= scale * *grads[i];
  return fr.loss;
}

TrainResult train(Seq2SeqModel& model, const std::vector<Example>& corpus, const TrainConfig& config,
                  const LossCallback& on_log) {
  config.validate();
  TrainResult result;
  if (config.total_steps == 0) return result;
  if (corpus.empty()) throw Error("training corpus is empty");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ex = corpus[i];
    check_ids(model, ex);
    if ((config.max_src_len > 0 && ex.src.size() > static_cast<std::size_t>(config.max_src_len)) ||
        (config.max_tgt_len > 0 && ex.tgt.size() > static_cast<std::size_t>(config.max_tgt_len))) {
      throw Error("training example " + std::to_string(i) + " exceeds the maximum length");
    }
  }

  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), corpus.size());
  Rng order_rng(config.seed, 0);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  order_rng.shuffle(order);
  std::size_t pos = 0;
  std::vector<Example> chunk(batch);

  for (int64_t step = 1; step <= config.total_steps; ++step) {
    if (corpus.size() - pos < batch) {
      order_rng.shuffle(order);
      pos = 0;
    }
    for (std::size_t i = 0; i < batch; ++i) chunk[i] = corpus[order[pos + i]];
    pos += batch;

    const double lr = config.lr_at(step);
    const Dropout dropout{config.dropout, config.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(step))};
    const double loss = sgd_step(model, chunk, lr, config.dropout > 0.0 ? &dropout : nullptr, config.clip_norm);
    if (!std::isfinite(loss) || !model.all_finite()) throw DivergenceError(step, loss);
    if (step % config.log_every == 0 || step == config.total_steps) {
      LossPoint p{step, loss, lr};
      result.curve.push_back(p);
      if (on_log) on_log(p);
    }
    result.steps = step;
  }
  return result;
}

double token_accuracy(const Seq2SeqModel& model, const std::vector<Example>& corpus) {
  std::size_t right = 0, total = 0;
  for (const auto& ex : corpus) {
    const SentenceCache c = forward_sentence(model, ex, 0.0, nullptr);
    for (std::size_t t = 0; t < c.probs.size(); ++t) {
      Eigen::Index best = 0;
      c.probs[t].maxCoeff(&best);
      right += static_cast<int>(best) == c.tgt_out[t];
      ++total;
    }
  }
  return total ? static_cast<double>(right) / static_cast<double>(total) : 0.0;
}

}  // namespace subchar::nmt
