#include "subchar/eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "subchar/random.h"
#include "subchar/text.h"

namespace subchar::eval {

namespace {

using Ngrams = std::map<std::vector<std::string>, std::size_t>;

Ngrams count_ngrams(const std::vector<std::string>& toks, std::size_t n) {
  Ngrams out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                   toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

void check_corpus(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw Error("hypothesis/reference count mismatch: " + std::to_string(hyps) + " vs " + std::to_string(refs));
  }
  if (hyps == 0) throw Error("empty corpus");
}

std::vector<SentenceStats> corpus_stats(const std::vector<std::string>& hyps,
                                        const std::vector<std::string>& refs, const BleuOptions& options) {
  if (options.max_n < 1) throw Error("max_n must be positive");
  const Tokenizer tok = options.tokenizer ? options.tokenizer : Tokenizer(whitespace_tokenizer);
  std::vector<SentenceStats> stats;
  stats.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    stats.push_back(sentence_stats(tok(hyps[i]), tok(refs[i]), options.max_n));
  }
  return stats;
}

}  // namespace

std::vector<std::string> whitespace_tokenizer(const std::string& line) { return split_whitespace(line); }

std::vector<std::string> char_tokenizer(const std::string& line) {
  std::vector<std::string> out;
  for (const auto& word : split_whitespace(line)) {
    for (auto& g : split_graphemes(word)) out.push_back(std::move(g));
  }
  return out;
}

SentenceStats sentence_stats(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int max_n) {
  SentenceStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 1; n <= max_n; ++n) {
    const auto h = count_ngrams(hyp, static_cast<std::size_t>(n));
    const auto r = count_ngrams(ref, static_cast<std::size_t>(n));
    std::size_t match = 0, total = 0;
    for (const auto& [gram, count] : h) {
      total += count;
      const auto it = r.find(gram);
      if (it != r.end()) match += std::min(count, it->second);
    }
    s.matches.push_back(match);
    s.totals.push_back(total);
  }
  return s;
}

BleuResult bleu_from_stats(const std::vector<SentenceStats>& stats, const std::vector<std::size_t>& picks,
                           int max_n, bool smoothing) {
  std::vector<std::size_t> matches(static_cast<std::size_t>(max_n), 0), totals(static_cast<std::size_t>(max_n), 0);
  BleuResult r;
  for (std::size_t i : picks) {
    const SentenceStats& s = stats[i];
    r.hyp_len += s.hyp_len;
    r.ref_len += s.ref_len;
    for (std::size_t n = 0; n < matches.size(); ++n) {
      matches[n] += s.matches[n];
      totals[n] += s.totals[n];
    }
  }
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < matches.size(); ++n) {
    double p = 0.0;
    if (smoothing && n > 0) {
      p = (static_cast<double>(matches[n]) + 1.0) / (static_cast<double>(totals[n]) + 1.0);
    } else if (totals[n] > 0) {
      p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    }
    r.precisions.push_back(p);
    if (p == 0.0) zero = true;
    else log_sum += std::log(p);
  }
  if (r.hyp_len == 0) r.brevity_penalty = 0.0;
  else if (r.hyp_len >= r.ref_len) r.brevity_penalty = 1.0;
  else r.brevity_penalty = std::exp(1.0 - static_cast<double>(r.ref_len) / static_cast<double>(r.hyp_len));
  r.score = zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / static_cast<double>(max_n));
  return r;
}

BleuResult bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                const BleuOptions& options) {
  check_corpus(hyps.size(), refs.size());
  const auto stats = corpus_stats(hyps, refs, options);
  std::vector<std::size_t> all(stats.size());
  std::iota(all.begin(), all.end(), 0);
  return bleu_from_stats(stats, all, options.max_n, options.smoothing);
}

SignificanceResult bootstrap_significance(const std::vector<std::string>& hyps_a,
                                          const std::vector<std::string>& hyps_b,
                                          const std::vector<std::string>& refs, std::size_t samples,
                                          double alpha, uint64_t seed, const BleuOptions& options) {
  check_corpus(hyps_a.size(), refs.size());
  check_corpus(hyps_b.size(), refs.size());
  if (samples == 0) throw Error("bootstrap needs at least one sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  const auto stats_a = corpus_stats(hyps_a, refs, options);
  const auto stats_b = corpus_stats(hyps_b, refs, options);
  const std::size_t n = refs.size();

  SignificanceResult r;
  r.samples = samples;
  r.alpha = alpha;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  r.bleu_a = bleu_from_stats(stats_a, all, options.max_n, options.smoothing).score;
  r.bleu_b = bleu_from_stats(stats_b, all, options.max_n, options.smoothing).score;

  std::vector<std::size_t> picks(n);
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(seed, s);
    for (auto& p : picks) p = rng.index(n);
    const double a = bleu_from_stats(stats_a, picks, options.max_n, options.smoothing).score;
    const double b = bleu_from_stats(stats_b, picks, options.max_n, options.smoothing).score;
    if (a > b) ++r.wins_a;
    else if (b > a) ++r.wins_b;
    else ++r.ties;
  }
  if (r.bleu_a == r.bleu_b) {
    r.p_value = 1.0;
  } else {
    const std::size_t lower_wins = r.bleu_a < r.bleu_b ? r.wins_a : r.wins_b;
    r.p_value = static_cast<double>(lower_wins + r.ties) / static_cast<double>(samples);
  }
  r.significant = r.p_value <= alpha;
  return r;
}

}  // namespace subchar::eval
