#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace subchar::eval {

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

std::vector<std::string> whitespace_tokenizer(const std::string& line);
/// One token per grapheme, whitespace dropped.
std::vector<std::string> char_tokenizer(const std::string& line);

struct BleuOptions {
  int max_n = 4;
  Tokenizer tokenizer;  // whitespace when empty
  bool smoothing = false;  // add-one on orders above 1
};

struct BleuResult {
  double score = 0.0;  // 0..100
  std::vector<double> precisions;
  double brevity_penalty = 0.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

/// Clipped n-gram matches and totals for one sentence pair.
struct SentenceStats {
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

SentenceStats sentence_stats(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int max_n);
BleuResult bleu_from_stats(const std::vector<SentenceStats>& stats, const std::vector<std::size_t>& picks,
                           int max_n, bool smoothing);

/// Corpus-level BLEU with one reference per sentence.
BleuResult bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                const BleuOptions& options = {});

struct SignificanceResult {
  std::size_t samples = 0;
  std::size_t wins_a = 0;
  std::size_t wins_b = 0;
  std::size_t ties = 0;
  double bleu_a = 0.0;
  double bleu_b = 0.0;
  double p_value = 1.0;
  double alpha = 0.0;
  bool significant = false;
};

/// Paired bootstrap resampling. p is the share of samples in which the system
/// with the lower full-corpus score scores at least as high as the other one;
/// equal full-corpus scores give p = 1. Sample s draws from Rng(seed, s).
SignificanceResult bootstrap_significance(const std::vector<std::string>& hyps_a,
                                          const std::vector<std::string>& hyps_b,
                                          const std::vector<std::string>& refs, std::size_t samples = 1000,
                                          double alpha = 1e-4, uint64_t seed = 1,
                                          const BleuOptions& options = {});

}  // namespace subchar::eval
