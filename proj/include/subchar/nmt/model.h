#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace subchar::nmt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Dims {
  int embedding = 16;
  int hidden = 32;
  int layers = 2;
  int attention = 0;  // 0 means "same as hidden"
  bool normalize_attention = true;
  double forget_bias = 1.0;  // constant added to the forget gate pre-activation

  int attention_size() const { return attention > 0 ? attention : hidden; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// One LSTM layer. Gate blocks in `weights` / `bias` are ordered
/// input, forget, output, candidate; weights act on [x; h_prev]. The forget
/// gate also receives Dims::forget_bias, which is not trained.
struct LstmLayer {
  Mat weights;
  Mat bias;  // 4h x 1
};

/// Two-stack LSTM encoder-decoder with additive attention at the decoder
/// output and input feeding of the attentional vector.
///
/// Embeddings are stored column-per-symbol. In shared mode the target side
/// reads `src_embedding` and `tgt_embedding` stays empty.
struct Seq2SeqModel {
  Dims dims;
  bool shared_embeddings = false;
  int src_vocab = 0;
  int tgt_vocab = 0;

  Mat src_embedding;  // emb x Vs
  Mat tgt_embedding;  // emb x Vt, empty when shared
  std::vector<LstmLayer> encoder;
  std::vector<LstmLayer> decoder;  // layer 0 input is [embedding; attentional vector]
  Mat att_query;   // a x h
  Mat att_keys;    // a x h
  Mat att_score;   // a x 1, the score vector v
  Mat att_gain;    // 1 x 1, used when attention is normalized
  Mat att_bias;    // a x 1, used when attention is normalized
  Mat att_output;  // h x 2h, maps [query; context] to the attentional vector
  Mat proj;        // Vt x h
  Mat proj_bias;   // Vt x 1

  const Mat& target_embedding() const { return shared_embeddings ? src_embedding : tgt_embedding; }
  Mat& target_embedding() { return shared_embeddings ? src_embedding : tgt_embedding; }

  /// Visits every parameter tensor in a fixed order. Unused tensors (empty
  /// target embedding in shared mode, gain/bias without normalization) are
  /// skipped.
  void visit(const std::function<void(const std::string&, Mat&)>& fn);
  void visit(const std::function<void(const std::string&, const Mat&)>& fn) const;

  std::size_t parameter_count() const;
  /// Order-sensitive hash of every parameter's bit pattern.
  uint64_t checksum() const;
  bool all_finite() const;
};

/// Parameters drawn uniformly from [-0.1, 0.1] in visit order.
Seq2SeqModel init_model(const Dims& dims, int src_vocab, int tgt_vocab, bool shared, uint64_t seed);

/// Same shapes, all zeros. Used for gradients.
Seq2SeqModel zeros_like(const Seq2SeqModel& model);

void check_shapes(const Seq2SeqModel& model);

}  // namespace subchar::nmt
