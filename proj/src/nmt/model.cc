#include "subchar/nmt/model.h"

#include <cmath>
#include <cstring>

#include "subchar/random.h"
#include "subchar/text.h"

namespace subchar::nmt {

namespace {

template <typename Model, typename Fn>
void visit_impl(Model& m, Fn&& fn) {
  fn("src_embedding", m.src_embedding);
  if (!m.shared_embeddings) fn("tgt_embedding", m.tgt_embedding);
  for (std::size_t l = 0; l < m.encoder.size(); ++l) {
    fn("encoder." + std::to_string(l) + ".weights", m.encoder[l].weights);
    fn("encoder." + std::to_string(l) + ".bias", m.encoder[l].bias);
  }
  for (std::size_t l = 0; l < m.decoder.size(); ++l) {
    fn("decoder." + std::to_string(l) + ".weights", m.decoder[l].weights);
    fn("decoder." + std::to_string(l) + ".bias", m.decoder[l].bias);
  }
  fn("att_query", m.att_query);
  fn("att_keys", m.att_keys);
  fn("att_score", m.att_score);
  if (m.dims.normalize_attention) {
    fn("att_gain", m.att_gain);
    fn("att_bias", m.att_bias);
  }
  fn("att_output", m.att_output);
  fn("proj", m.proj);
  fn("proj_bias", m.proj_bias);
}

Seq2SeqModel shaped(const Dims& dims, int src_vocab, int tgt_vocab, bool shared) {
  if (dims.embedding <= 0 || dims.hidden <= 0 || dims.layers <= 0 || dims.attention < 0) {
    throw Error("model dimensions must be positive");
  }
  if (src_vocab <= 0 || tgt_vocab <= 0) throw Error("vocabulary size must be positive");
  if (shared && src_vocab != tgt_vocab) throw Error("shared embeddings need one vocabulary");
  const int e = dims.embedding, h = dims.hidden, a = dims.attention_size();
  Seq2SeqModel m;
  m.dims = dims;
  m.shared_embeddings = shared;
  m.src_vocab = src_vocab;
  m.tgt_vocab = tgt_vocab;
  m.src_embedding = Mat::Zero(e, src_vocab);
  if (!shared) m.tgt_embedding = Mat::Zero(e, tgt_vocab);
  for (int l = 0; l < dims.layers; ++l) {
    const int enc_in = l == 0 ? e : h;
    const int dec_in = l == 0 ? e + h : h;
    m.encoder.push_back({Mat::Zero(4 * h, enc_in + h), Mat::Zero(4 * h, 1)});
    m.decoder.push_back({Mat::Zero(4 * h, dec_in + h), Mat::Zero(4 * h, 1)});
  }
  m.att_query = Mat::Zero(a, h);
  m.att_keys = Mat::Zero(a, h);
  m.att_score = Mat::Zero(a, 1);
  m.att_gain = Mat::Zero(1, 1);
  m.att_bias = Mat::Zero(a, 1);
  m.att_output = Mat::Zero(h, 2 * h);
  m.proj = Mat::Zero(tgt_vocab, h);
  m.proj_bias = Mat::Zero(tgt_vocab, 1);
  return m;
}

}  // namespace

void Seq2SeqModel::visit(const std::function<void(const std::string&, Mat&)>& fn) {
  visit_impl(*this, fn);
}

void Seq2SeqModel::visit(const std::function<void(const std::string&, const Mat&)>& fn) const {
  visit_impl(*this, fn);
}

std::size_t Seq2SeqModel::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

uint64_t Seq2SeqModel::checksum() const {
  std::string bytes;
  visit([&](const std::string& name, const Mat& m) {
    bytes += name;
    bytes.append(reinterpret_cast<const char*>(m.data()), sizeof(double) * static_cast<std::size_t>(m.size()));
  });
  return fnv1a64(bytes);
}

bool Seq2SeqModel::all_finite() const {
  bool ok = true;
  visit([&](const std::string&, const Mat& m) { ok = ok && m.allFinite(); });
  return ok;
}

Seq2SeqModel init_model(const Dims& dims, int src_vocab, int tgt_vocab, bool shared, uint64_t seed) {
  Seq2SeqModel m = shaped(dims, src_vocab, tgt_vocab, shared);
  Rng rng(seed);
  m.visit([&](const std::string&, Mat& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(-0.1, 0.1);
  });
  return m;
}

Seq2SeqModel zeros_like(const Seq2SeqModel& model) {
  return shaped(model.dims, model.src_vocab, model.tgt_vocab, model.shared_embeddings);
}

void check_shapes(const Seq2SeqModel& model) {
  const Seq2SeqModel ref = zeros_like(model);
  std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> expected;
  ref.visit([&](const std::string& name, const Mat& m) { expected.push_back({name, {m.rows(), m.cols()}}); });
  std::size_t i = 0;
  model.visit([&](const std::string& name, const Mat& m) {
    if (i >= expected.size() || expected[i].first != name) throw Error("unexpected parameter " + name);
    if (expected[i].second != std::make_pair(m.rows(), m.cols())) {
      throw Error("parameter " + name + " has shape " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
    }
    ++i;
  });
  if (i != expected.size()) throw Error("model is missing parameters");
}

}  // namespace subchar::nmt
