#include "subchar/nmt/decoder.h"

#include <algorithm>
#include <limits>

#include "subchar/nmt/network.h"
#include "subchar/nmt/vocab.h"
#include "subchar/text.h"

namespace subchar::nmt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void mask_reserved(Vec& logp) {
  logp[Vocab::kPad] = kNegInf;
  logp[Vocab::kBos] = kNegInf;
}

struct Hypothesis {
  std::vector<int> tokens;
  double score = 0.0;
  DecoderState state;
};

struct Candidate {
  double score;
  std::size_t parent;
  int token;
};

}  // namespace

std::vector<int> greedy_decode(const Seq2SeqModel& model, const std::vector<int>& src, int max_len) {
  std::vector<int> out;
  if (src.empty() || max_len <= 0) return out;
  const EncodedSource enc = encode_source(model, src);
  DecoderState state = initial_decoder_state(model, enc);
  int token = Vocab::kBos;
  while (static_cast<int>(out.size()) < max_len) {
    Vec logp = decoder_step(model, enc, state, token);
    mask_reserved(logp);
    Eigen::Index best = 0;
    logp.maxCoeff(&best);
    token = static_cast<int>(best);
    if (token == Vocab::kEos) break;
    out.push_back(token);
  }
  return out;
}

std::vector<int> beam_decode(const Seq2SeqModel& model, const std::vector<int>& src, int width,
                             int max_len) {
  if (width < 1) throw Error("beam width must be positive");
  if (src.empty() || max_len <= 0) return {};
  const EncodedSource enc = encode_source(model, src);
  std::vector<Hypothesis> alive{{{}, 0.0, initial_decoder_state(model, enc)}};
  bool have_done = false;
  Hypothesis done;

  for (int step = 0; step < max_len && !alive.empty(); ++step) {
    std::vector<Candidate> cands;
    for (std::size_t h = 0; h < alive.size(); ++h) {
      const int prev = alive[h].tokens.empty() ? Vocab::kBos : alive[h].tokens.back();
      Vec logp = decoder_step(model, enc, alive[h].state, prev);
      mask_reserved(logp);
      for (Eigen::Index t = 0; t < logp.size(); ++t) {
        if (logp[t] == kNegInf) continue;
        cands.push_back({alive[h].score + logp[t], h, static_cast<int>(t)});
      }
    }
    const std::size_t keep = std::min(cands.size(), alive.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& c = cands[i];
      const Hypothesis& parent = alive[c.parent];
      if (c.token == Vocab::kEos) {
        if (!have_done || c.score > done.score) {
          done = {parent.tokens, c.score, {}};
          have_done = true;
        }
        continue;
      }
      Hypothesis h{parent.tokens, c.score, parent.state};
      h.tokens.push_back(c.token);
      next.push_back(std::move(h));
    }
    alive = std::move(next);
    // Scores only decrease, so no live hypothesis can overtake a finished one
    // that already beats the best of them.
    if (have_done) {
      std::erase_if(alive, [&](const Hypothesis& h) { return h.score <= done.score; });
    }
  }
  if (have_done) return done.tokens;
  // Nothing finished within max_len: best truncated hypothesis.
  const auto best = std::max_element(alive.begin(), alive.end(),
                                     [](const Hypothesis& a, const Hypothesis& b) { return a.score < b.score; });
  return best == alive.end() ? std::vector<int>{} : best->tokens;
}

std::vector<int> translate(const Seq2SeqModel& model, const std::vector<int>& src,
                           const TranslateOptions& options) {
  if (options.beam <= 1) return greedy_decode(model, src, options.max_len);
  return beam_decode(model, src, options.beam, options.max_len);
}

}  // namespace subchar::nmt
