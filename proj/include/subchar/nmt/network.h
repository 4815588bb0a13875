#pragma once

#include <span>
#include <vector>

#include "subchar/nmt/model.h"
#include "subchar/random.h"

namespace subchar::nmt {

/// A training pair of id sequences, without sentence markers. The encoder
/// reads `src` followed by end-of-sentence; the decoder predicts `tgt`
/// followed by end-of-sentence.
struct Example {
  std::vector<int> src;
  std::vector<int> tgt;
};

/// Normalized additive attention weights of `query` over the columns of
/// `memory` (one encoder state per column).
Vec attention_weights(const Seq2SeqModel& model, const Vec& query, const Mat& memory);

struct LstmState {
  Vec h;
  Vec c;
};

// Per-step intermediate values kept for the backward pass.
struct LstmTrace {
  Vec input;  // [x; h_prev]
  Vec i, f, o, g;
  Vec c_prev, c, tanh_c;
};

struct AttentionTrace {
  Mat hidden;  // tanh(W_q q + W_k m_j + b), a x S
  Vec scores;
  Vec weights;
  Vec joined;     // [query; context]
  Vec attentional;
};

struct SentenceCache {
  std::vector<int> src;      // with end-of-sentence appended
  std::vector<int> tgt_in;   // begin-of-sentence + target
  std::vector<int> tgt_out;  // target + end-of-sentence
  std::vector<std::vector<LstmTrace>> enc;  // [layer][time]
  std::vector<std::vector<LstmTrace>> dec;
  std::vector<std::vector<Vec>> enc_masks;  // dropout mask on each layer's input; empty when off
  std::vector<std::vector<Vec>> dec_masks;
  Mat memory;  // h x S
  Mat keys;    // a x S
  std::vector<AttentionTrace> att;
  std::vector<Vec> probs;
  double loss_sum = 0.0;
};

struct BatchCache {
  std::vector<SentenceCache> sentences;
  std::size_t tokens = 0;
};

struct ForwardResult {
  double loss = 0.0;  // mean token cross-entropy
  std::size_t tokens = 0;
  std::vector<Mat> attention;  // per sentence, target steps x source steps
  BatchCache cache;
};

struct Dropout {
  double rate = 0.0;
  uint64_t seed = 0;
};

/// Teacher-forced forward pass. Dropout applies to every layer's
/// non-recurrent input when `dropout` is given with a positive rate; mask for
/// sentence i is drawn from Rng(seed, i).
ForwardResult forward(const Seq2SeqModel& model, std::span<const Example> batch,
                      const Dropout* dropout = nullptr);

/// Exact gradient of ForwardResult::loss with respect to every parameter.
Seq2SeqModel backward(const Seq2SeqModel& model, const BatchCache& cache);

// Single-sentence building blocks. `scale` multiplies the sentence's gradient.
SentenceCache forward_sentence(const Seq2SeqModel& model, const Example& ex, double dropout_rate,
                               Rng* rng);
void backward_sentence(const Seq2SeqModel& model, const SentenceCache& cache, double scale,
                       Seq2SeqModel& grad);

// Incremental decoding.
struct EncodedSource {
  Mat memory;
  Mat keys;
  std::vector<LstmState> final_states;
};

struct DecoderState {
  std::vector<LstmState> layers;
  Vec attentional;
};

EncodedSource encode_source(const Seq2SeqModel& model, const std::vector<int>& src);
DecoderState initial_decoder_state(const Seq2SeqModel& model, const EncodedSource& enc);
/// Feeds `token`, advances `state` and returns the output log-probabilities.
Vec decoder_step(const Seq2SeqModel& model, const EncodedSource& enc, DecoderState& state, int token,
                 Vec* attention = nullptr);

void check_ids(const Seq2SeqModel& model, const Example& ex);

}  // namespace subchar::nmt
