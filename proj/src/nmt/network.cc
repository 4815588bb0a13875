#include "subchar/nmt/network.h"

#include <cmath>
#include <string>

#include "subchar/nmt/vocab.h"
#include "subchar/text.h"

namespace subchar::nmt {

namespace {

Vec sigmoid(const Vec& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

Vec log_softmax(const Vec& z) {
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return (z.array() - lse).matrix();
}

Vec softmax(const Vec& z) {
  const Vec e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

void lstm_forward(const LstmLayer& p, double forget_bias, const Vec& x, const LstmState& prev, LstmTrace& t,
                  LstmState& next) {
  const Eigen::Index h = prev.h.size();
  t.input.resize(x.size() + h);
  t.input << x, prev.h;
  const Vec z = p.weights * t.input + p.bias.col(0);
  t.i = sigmoid(z.segment(0, h));
  t.f = sigmoid((z.segment(h, h).array() + forget_bias).matrix());
  t.o = sigmoid(z.segment(2 * h, h));
  t.g = z.segment(3 * h, h).array().tanh().matrix();
  t.c_prev = prev.c;
  t.c = t.f.cwiseProduct(prev.c) + t.i.cwiseProduct(t.g);
  t.tanh_c = t.c.array().tanh().matrix();
  next.c = t.c;
  next.h = t.o.cwiseProduct(t.tanh_c);
}

// dh / dc: gradients arriving at this step's outputs. Writes input and
// previous-state gradients, accumulates parameter gradients.
void lstm_backward(const LstmLayer& p, const LstmTrace& t, const Vec& dh, const Vec& dc_in,
                   LstmLayer& grad, Vec& dx, Vec& dh_prev, Vec& dc_prev) {
  const Eigen::Index h = dh.size();
  const Vec d_o = dh.cwiseProduct(t.tanh_c);
  const Vec dc = dc_in + dh.cwiseProduct(t.o).cwiseProduct((1.0 - t.tanh_c.array().square()).matrix());
  Vec dz(4 * h);
  dz.segment(0, h) = dc.cwiseProduct(t.g).array() * t.i.array() * (1.0 - t.i.array());
  dz.segment(h, h) = dc.cwiseProduct(t.c_prev).array() * t.f.array() * (1.0 - t.f.array());
  dz.segment(2 * h, h) = d_o.array() * t.o.array() * (1.0 - t.o.array());
  dz.segment(3 * h, h) = dc.cwiseProduct(t.i).array() * (1.0 - t.g.array().square());
  dc_prev = dc.cwiseProduct(t.f);
  grad.weights.noalias() += dz * t.input.transpose();
  grad.bias.col(0) += dz;
  const Vec dinput = p.weights.transpose() * dz;
  dx = dinput.head(dinput.size() - h);
  dh_prev = dinput.tail(h);
}

// Effective score vector: g * v / |v| when normalized, v otherwise.
Vec score_vector(const Seq2SeqModel& m) {
  const Vec v = m.att_score.col(0);
  if (!m.dims.normalize_attention) return v;
  return m.att_gain(0, 0) * v / v.norm();
}

void attention_forward(const Seq2SeqModel& m, const Vec& query, const Mat& memory, const Mat& keys,
                       AttentionTrace& t) {
  Vec pre = m.att_query * query;
  if (m.dims.normalize_attention) pre += m.att_bias.col(0);
  t.hidden = (keys.colwise() + pre).array().tanh().matrix();
  t.scores = t.hidden.transpose() * score_vector(m);
  t.weights = softmax(t.scores);
  const Vec context = memory * t.weights;
  t.joined.resize(query.size() + context.size());
  t.joined << query, context;
  t.attentional = (m.att_output * t.joined).array().tanh().matrix();
}

Vec dropout_mask(Eigen::Index n, double rate, Rng& rng) {
  Vec mask(n);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < n; ++i) mask[i] = rng.uniform() < rate ? 0.0 : keep;
  return mask;
}

LstmState zero_state(int h) { return {Vec::Zero(h), Vec::Zero(h)}; }

}  // namespace

void check_ids(const Seq2SeqModel& model, const Example& ex) {
  if (ex.tgt.empty()) throw Error("empty target sequence");
  for (int id : ex.src) {
    if (id < 0 || id >= model.src_vocab) throw Error("source id " + std::to_string(id) + " out of range");
  }
  for (int id : ex.tgt) {
    if (id < 0 || id >= model.tgt_vocab) throw Error("target id " + std::to_string(id) + " out of range");
  }
}

Vec attention_weights(const Seq2SeqModel& model, const Vec& query, const Mat& memory) {
  AttentionTrace t;
  attention_forward(model, query, memory, model.att_keys * memory, t);
  return t.weights;
}

SentenceCache forward_sentence(const Seq2SeqModel& m, const Example& ex, double rate, Rng* rng) {
  check_ids(m, ex);
  const int layers = m.dims.layers, h = m.dims.hidden;
  const bool drop = rate > 0.0 && rng != nullptr;
  SentenceCache c;
  c.src = ex.src;
  c.src.push_back(Vocab::kEos);
  c.tgt_in.push_back(Vocab::kBos);
  c.tgt_in.insert(c.tgt_in.end(), ex.tgt.begin(), ex.tgt.end());
  c.tgt_out = ex.tgt;
  c.tgt_out.push_back(Vocab::kEos);
  const auto S = static_cast<Eigen::Index>(c.src.size());
  const std::size_t T = c.tgt_in.size();

  c.enc.assign(layers, std::vector<LstmTrace>(c.src.size()));
  c.dec.assign(layers, std::vector<LstmTrace>(T));
  c.enc_masks.assign(layers, {});
  c.dec_masks.assign(layers, {});
  c.memory.resize(h, S);

  std::vector<LstmState> state(layers, zero_state(h));
  for (Eigen::Index t = 0; t < S; ++t) {
    Vec x = m.src_embedding.col(c.src[t]);
    for (int l = 0; l < layers; ++l) {
      if (drop) {
        c.enc_masks[l].push_back(dropout_mask(x.size(), rate, *rng));
        x = x.cwiseProduct(c.enc_masks[l].back());
      }
      LstmState next;
      lstm_forward(m.encoder[l], m.dims.forget_bias, x, state[l], c.enc[l][t], next);
      state[l] = std::move(next);
      x = state[l].h;
    }
    c.memory.col(t) = x;
  }
  c.keys = m.att_keys * c.memory;

  const Mat& temb = m.target_embedding();
  Vec attentional = Vec::Zero(h);
  c.att.resize(T);
  c.probs.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    Vec emb = temb.col(c.tgt_in[t]);
    Vec x;
    for (int l = 0; l < layers; ++l) {
      if (l == 0) {
        if (drop) {
          c.dec_masks[0].push_back(dropout_mask(emb.size(), rate, *rng));
          emb = emb.cwiseProduct(c.dec_masks[0].back());
        }
        x.resize(emb.size() + h);
        x << emb, attentional;
      } else if (drop) {
        c.dec_masks[l].push_back(dropout_mask(x.size(), rate, *rng));
        x = x.cwiseProduct(c.dec_masks[l].back());
      }
      LstmState next;
      lstm_forward(m.decoder[l], m.dims.forget_bias, x, state[l], c.dec[l][t], next);
      state[l] = std::move(next);
      x = state[l].h;
    }
    attention_forward(m, x, c.memory, c.keys, c.att[t]);
    attentional = c.att[t].attentional;
    const Vec logp = log_softmax(m.proj * attentional + m.proj_bias.col(0));
    c.loss_sum -= logp[c.tgt_out[t]];
    c.probs[t] = logp.array().exp().matrix();
  }
  return c;
}

void backward_sentence(const Seq2SeqModel& m, const SentenceCache& c, double scale,
                       Seq2SeqModel& g) {
  const int layers = m.dims.layers, h = m.dims.hidden;
  const int e = m.dims.embedding;
  const auto S = c.memory.cols();
  const std::size_t T = c.tgt_in.size();
  Mat& g_temb = g.target_embedding();

  Mat d_memory = Mat::Zero(h, S);
  Mat d_keys = Mat::Zero(c.keys.rows(), S);
  const Vec v = m.att_score.col(0);
  const Vec v_eff = score_vector(m);
  Vec d_v_eff = Vec::Zero(v.size());

  std::vector<Vec> rec_dh(layers, Vec::Zero(h)), rec_dc(layers, Vec::Zero(h));
  Vec d_feed = Vec::Zero(h);
  Vec dx, dh_prev, dc_prev;

  for (std::size_t t = T; t-- > 0;) {
    const AttentionTrace& at = c.att[t];
    Vec d_logits = c.probs[t];
    d_logits[c.tgt_out[t]] -= 1.0;
    d_logits *= scale;
    g.proj.noalias() += d_logits * at.attentional.transpose();
    g.proj_bias.col(0) += d_logits;

    const Vec d_att = m.proj.transpose() * d_logits + d_feed;
    const Vec d_att_pre = d_att.cwiseProduct((1.0 - at.attentional.array().square()).matrix());
    g.att_output.noalias() += d_att_pre * at.joined.transpose();
    const Vec d_joined = m.att_output.transpose() * d_att_pre;
    Vec d_query = d_joined.head(h);
    const Vec d_context = d_joined.tail(h);

    d_memory.noalias() += d_context * at.weights.transpose();
    const Vec d_weights = c.memory.transpose() * d_context;
    const Vec d_scores = at.weights.cwiseProduct((d_weights.array() - at.weights.dot(d_weights)).matrix());
    d_v_eff.noalias() += at.hidden * d_scores;
    const Mat d_hidden_pre =
        ((v_eff * d_scores.transpose()).array() * (1.0 - at.hidden.array().square())).matrix();
    d_keys += d_hidden_pre;
    const Vec d_pre = d_hidden_pre.rowwise().sum();
    const Vec query = at.joined.head(h);
    g.att_query.noalias() += d_pre * query.transpose();
    d_query.noalias() += m.att_query.transpose() * d_pre;
    if (m.dims.normalize_attention) g.att_bias.col(0) += d_pre;

    Vec from_above = d_query;
    for (int l = layers - 1; l >= 0; --l) {
      const Vec dh = from_above + rec_dh[l];
      lstm_backward(m.decoder[l], c.dec[l][t], dh, rec_dc[l], g.decoder[l], dx, dh_prev, dc_prev);
      rec_dh[l] = dh_prev;
      rec_dc[l] = dc_prev;
      if (l > 0) {
        from_above = c.dec_masks[l].empty() ? dx : dx.cwiseProduct(c.dec_masks[l][t]);
      } else {
        Vec d_emb = dx.head(e);
        if (!c.dec_masks[0].empty()) d_emb = d_emb.cwiseProduct(c.dec_masks[0][t]);
        g_temb.col(c.tgt_in[t]) += d_emb;
        d_feed = dx.tail(h);
      }
    }
  }

  if (m.dims.normalize_attention) {
    const double n = v.norm();
    const Vec v_hat = v / n;
    const double gain = m.att_gain(0, 0);
    g.att_gain(0, 0) += d_v_eff.dot(v_hat);
    g.att_score.col(0) += (gain / n) * (d_v_eff - v_hat * v_hat.dot(d_v_eff));
  } else {
    g.att_score.col(0) += d_v_eff;
  }

  g.att_keys.noalias() += d_keys * c.memory.transpose();
  d_memory.noalias() += m.att_keys.transpose() * d_keys;

  for (Eigen::Index t = S; t-- > 0;) {
    Vec from_above = d_memory.col(t);
    for (int l = layers - 1; l >= 0; --l) {
      const Vec dh = from_above + rec_dh[l];
      lstm_backward(m.encoder[l], c.enc[l][t], dh, rec_dc[l], g.encoder[l], dx, dh_prev, dc_prev);
      rec_dh[l] = dh_prev;
      rec_dc[l] = dc_prev;
      if (!c.enc_masks[l].empty()) dx = dx.cwiseProduct(c.enc_masks[l][t]);
      if (l > 0) {
        from_above = dx;
      } else {
        g.src_embedding.col(c.src[t]) += dx;
      }
    }
  }
}

ForwardResult forward(const Seq2SeqModel& model, std::span<const Example> batch, const Dropout* dropout) {
  ForwardResult r;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    SentenceCache sc;
    if (dropout != nullptr && dropout->rate > 0.0) {
      Rng rng(dropout->seed, i);
      sc = forward_sentence(model, batch[i], dropout->rate, &rng);
    } else {
      sc = forward_sentence(model, batch[i], 0.0, nullptr);
    }
    loss += sc.loss_sum;
    r.tokens += sc.tgt_out.size();
    Mat att(static_cast<Eigen::Index>(sc.att.size()), sc.memory.cols());
    for (std::size_t t = 0; t < sc.att.size(); ++t) att.row(static_cast<Eigen::Index>(t)) = sc.att[t].weights.transpose();
    r.attention.push_back(std::move(att));
    r.cache.sentences.push_back(std::move(sc));
  }
  r.cache.tokens = r.tokens;
  r.loss = r.tokens ? loss / static_cast<double>(r.tokens) : 0.0;
  return r;
}

Seq2SeqModel backward(const Seq2SeqModel& model, const BatchCache& cache) {
  Seq2SeqModel g = zeros_like(model);
  if (cache.tokens == 0) return g;
  const double scale = 1.0 / static_cast<double>(cache.tokens);
  for (const auto& sc : cache.sentences) backward_sentence(model, sc, scale, g);
  return g;
}

EncodedSource encode_source(const Seq2SeqModel& m, const std::vector<int>& src_ids) {
  const int layers = m.dims.layers, h = m.dims.hidden;
  std::vector<int> src = src_ids;
  src.push_back(Vocab::kEos);
  for (int id : src) {
    if (id < 0 || id >= m.src_vocab) throw Error("source id " + std::to_string(id) + " out of range");
  }
  EncodedSource enc;
  enc.memory.resize(h, static_cast<Eigen::Index>(src.size()));
  enc.final_states.assign(layers, zero_state(h));
  LstmTrace scratch;
  for (std::size_t t = 0; t < src.size(); ++t) {
    Vec x = m.src_embedding.col(src[t]);
    for (int l = 0; l < layers; ++l) {
      LstmState next;
      lstm_forward(m.encoder[l], m.dims.forget_bias, x, enc.final_states[l], scratch, next);
      enc.final_states[l] = std::move(next);
      x = enc.final_states[l].h;
    }
    enc.memory.col(static_cast<Eigen::Index>(t)) = x;
  }
  enc.keys = m.att_keys * enc.memory;
  return enc;
}

DecoderState initial_decoder_state(const Seq2SeqModel& m, const EncodedSource& enc) {
  return {enc.final_states, Vec::Zero(m.dims.hidden)};
}

Vec decoder_step(const Seq2SeqModel& m, const EncodedSource& enc, DecoderState& state, int token,
                 Vec* attention) {
  if (token < 0 || token >= m.tgt_vocab) throw Error("target id " + std::to_string(token) + " out of range");
  const int layers = m.dims.layers;
  LstmTrace scratch;
  const Vec emb = m.target_embedding().col(token);
  Vec x(emb.size() + state.attentional.size());
  x << emb, state.attentional;
  for (int l = 0; l < layers; ++l) {
    LstmState next;
    lstm_forward(m.decoder[l], m.dims.forget_bias, x, state.layers[l], scratch, next);
    state.layers[l] = std::move(next);
    x = state.layers[l].h;
  }
  AttentionTrace at;
  attention_forward(m, x, enc.memory, enc.keys, at);
  state.attentional = at.attentional;
  if (attention != nullptr) *attention = at.weights;
  return log_softmax(m.proj * at.attentional + m.proj_bias.col(0));
}

}  // namespace subchar::nmt
