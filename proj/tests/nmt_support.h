#pragma once

#include <cmath>
#include <vector>

#include "subchar/nmt/model.h"
#include "subchar/nmt/network.h"
#include "subchar/nmt/vocab.h"
#include "subchar/random.h"

namespace support {

using subchar::nmt::Mat;
using subchar::nmt::Seq2SeqModel;
using subchar::nmt::Vec;

// Attention weights written out with scalar loops, straight from the formula.
inline std::vector<double> reference_attention(const Seq2SeqModel& m, const Vec& q, const Mat& keys) {
  const int a = static_cast<int>(m.att_query.rows());
  const int h = static_cast<int>(m.att_query.cols());
  const int n = static_cast<int>(keys.cols());
  std::vector<double> v(a);
  double norm = 0.0;
  for (int r = 0; r < a; ++r) norm += m.att_score(r, 0) * m.att_score(r, 0);
  norm = std::sqrt(norm);
  for (int r = 0; r < a; ++r) {
    v[r] = m.dims.normalize_attention ? m.att_gain(0, 0) * m.att_score(r, 0) / norm : m.att_score(r, 0);
  }
  std::vector<double> score(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int r = 0; r < a; ++r) {
      double u = m.dims.normalize_attention ? m.att_bias(r, 0) : 0.0;
      for (int k = 0; k < h; ++k) u += m.att_query(r, k) * q[k] + m.att_keys(r, k) * keys(k, j);
      s += v[r] * std::tanh(u);
    }
    score[j] = s;
  }
  double mx = score[0];
  for (double s : score) mx = std::max(mx, s);
  double z = 0.0;
  for (double& s : score) z += (s = std::exp(s - mx));
  for (double& s : score) s /= z;
  return score;
}

inline std::vector<subchar::nmt::Example> random_batch(subchar::Rng& rng, int n, int len, int src_vocab,
                                                       int tgt_vocab) {
  using subchar::nmt::Vocab;
  std::vector<subchar::nmt::Example> batch(n);
  for (auto& ex : batch) {
    for (int t = 0; t < len; ++t) {
      ex.src.push_back(Vocab::kReserved + static_cast<int>(rng.index(src_vocab - Vocab::kReserved)));
      ex.tgt.push_back(Vocab::kReserved + static_cast<int>(rng.index(tgt_vocab - Vocab::kReserved)));
    }
  }
  return batch;
}

struct GradConfig {
  const char* name;
  subchar::nmt::Dims dims;
  int len;
};

inline std::vector<GradConfig> grad_configs() {
  subchar::nmt::Dims one{4, 4, 1, 4, false};
  subchar::nmt::Dims two{6, 6, 2, 6, false};
  subchar::nmt::Dims normed{6, 6, 2, 6, true};
  return {{"1-layer d=4 len=3", one, 3}, {"2-layer d=6", two, 4}, {"2-layer d=6 normalized attention", normed, 4}};
}

}  // namespace support
