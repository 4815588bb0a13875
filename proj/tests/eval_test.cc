#include <gtest/gtest.h>

#include <cmath>

#include "eval_support.h"
#include "subchar/eval.h"
#include "subchar/text.h"

using namespace subchar;
using namespace subchar::eval;

TEST(Bleu, IdentityScoresExactlyOneHundred) {
  Rng rng(1);
  const auto refs = support::random_sentences(rng, 50);
  const auto r = bleu(refs, refs);
  EXPECT_EQ(r.score, 100.0);
  EXPECT_EQ(r.brevity_penalty, 1.0);
  for (double p : r.precisions) EXPECT_EQ(p, 1.0);
}

TEST(Bleu, ClippedUnigrams) {
  const auto r = bleu({"the the the"}, {"the cat"});
  ASSERT_EQ(r.precisions.size(), 4u);
  EXPECT_DOUBLE_EQ(r.precisions[0], 1.0 / 3.0);
  EXPECT_EQ(r.precisions[1], 0.0);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.brevity_penalty, 1.0);
  EXPECT_EQ(r.hyp_len, 3u);
  EXPECT_EQ(r.ref_len, 2u);
}

TEST(Bleu, HandComputedScores) {
  // p = 4/5, 3/4, 2/3, 1/2, no brevity penalty.
  EXPECT_NEAR(bleu({"a b c d e"}, {"a b c d f"}).score, 100.0 * std::pow(0.2, 0.25), 1e-12);
  // Perfect precision, BP = exp(1 - 6/4).
  const auto short_hyp = bleu({"a b c d"}, {"a b c d e f"});
  EXPECT_NEAR(short_hyp.brevity_penalty, std::exp(-0.5), 1e-15);
  EXPECT_NEAR(short_hyp.score, 100.0 * std::exp(-0.5), 1e-12);
}

TEST(Bleu, PermutationAndDuplicationInvariance) {
  Rng rng(2);
  auto refs = support::random_sentences(rng, 40);
  auto hyps = support::random_sentences(rng, 40);
  for (std::size_t i = 0; i < 40; i += 2) hyps[i] = refs[i];
  const double base = bleu(hyps, refs).score;
  EXPECT_GT(base, 0.0);

  std::vector<std::size_t> order(40);
  for (std::size_t i = 0; i < 40; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::string> ph, pr;
  for (auto i : order) {
    ph.push_back(hyps[i]);
    pr.push_back(refs[i]);
  }
  EXPECT_DOUBLE_EQ(bleu(ph, pr).score, base);

  auto dh = hyps, dr = refs;
  dh.insert(dh.end(), hyps.begin(), hyps.end());
  dr.insert(dr.end(), refs.begin(), refs.end());
  EXPECT_DOUBLE_EQ(bleu(dh, dr).score, base);
}

TEST(Bleu, EmptyHypothesisLineIsNotAnError) {
  const auto r = bleu({"", "a b c d"}, {"x y", "a b c d"});
  EXPECT_EQ(r.hyp_len, 4u);
  EXPECT_EQ(r.ref_len, 6u);
  EXPECT_NEAR(r.score, 100.0 * std::exp(-0.5), 1e-12);
  EXPECT_EQ(bleu({""}, {"a"}).score, 0.0);
}

TEST(Bleu, Errors) {
  EXPECT_THROW(bleu({"a"}, {"a", "b"}), Error);
  EXPECT_THROW(bleu({}, {}), Error);
  BleuOptions o;
  o.max_n = 0;
  EXPECT_THROW(bleu({"a"}, {"a"}, o), Error);
}

TEST(Bleu, TokenizersAndSmoothing) {
  BleuOptions chars;
  chars.tokenizer = char_tokenizer;
  EXPECT_EQ(char_tokenizer("森林 木"), (std::vector<std::string>{"森", "林", "木"}));
  EXPECT_EQ(whitespace_tokenizer("  a  b "), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(bleu({"森林木驰"}, {"森林 木 驰"}, chars).score, 100.0);
  // Too short for 4-grams: that order has no candidates and counts as zero.
  EXPECT_EQ(bleu({"森林木"}, {"森林 木"}, chars).score, 0.0);

  BleuOptions smooth;
  smooth.smoothing = true;
  const auto r = bleu({"a b"}, {"a c"}, smooth);
  // p1 = 1/2 stays unsmoothed; p2..p4 are (0+1)/(1+1), (0+1)/(0+1), (0+1)/(0+1).
  EXPECT_DOUBLE_EQ(r.precisions[0], 0.5);
  EXPECT_GT(r.score, 0.0);
}

TEST(Bleu, StatsAgreeWithCorpusScore) {
  Rng rng(3);
  const auto refs = support::random_sentences(rng, 20);
  const auto hyps = support::random_sentences(rng, 20);
  std::vector<SentenceStats> stats;
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < 20; ++i) {
    stats.push_back(sentence_stats(whitespace_tokenizer(hyps[i]), whitespace_tokenizer(refs[i]), 4));
    picks.push_back(i);
  }
  EXPECT_DOUBLE_EQ(bleu_from_stats(stats, picks, 4, false).score, bleu(hyps, refs).score);
}

TEST(Bootstrap, IdenticalSystemsAreNotSignificant) {
  Rng rng(4);
  const auto refs = support::random_sentences(rng, 100);
  const auto hyps = support::random_sentences(rng, 100);
  const auto r = bootstrap_significance(hyps, hyps, refs, 200, 1e-4, 9);
  EXPECT_EQ(r.ties, 200u);
  EXPECT_EQ(r.wins_a + r.wins_b, 0u);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.significant);
}

TEST(Bootstrap, SeparationCaseIsSignificant) {
  Rng rng(5);
  const auto refs = support::random_sentences(rng, 100);
  const auto garbage = support::shuffled_garbage(refs, 5);
  const auto r = bootstrap_significance(refs, garbage, refs, 1000, 0.001, 3);
  EXPECT_EQ(r.bleu_a, 100.0);
  EXPECT_LT(r.bleu_b, 50.0);
  EXPECT_EQ(r.wins_a, 1000u);
  EXPECT_LE(r.p_value, 0.001);
  EXPECT_TRUE(r.significant);
  // Order of the systems does not matter.
  const auto swapped = bootstrap_significance(garbage, refs, refs, 1000, 0.001, 3);
  EXPECT_EQ(swapped.p_value, r.p_value);
  EXPECT_EQ(swapped.wins_b, 1000u);
}

TEST(Bootstrap, DeterministicAndValidated) {
  Rng rng(6);
  const auto refs = support::random_sentences(rng, 60);
  const auto a = support::random_sentences(rng, 60);
  auto b = a;
  for (std::size_t i = 0; i < 60; i += 3) b[i] = refs[i];
  const auto r1 = bootstrap_significance(a, b, refs, 300, 0.05, 11);
  const auto r2 = bootstrap_significance(a, b, refs, 300, 0.05, 11);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_EQ(r1.wins_a, r2.wins_a);
  EXPECT_EQ(r1.wins_a + r1.wins_b + r1.ties, 300u);
  EXPECT_GE(r1.p_value, 0.0);
  EXPECT_LE(r1.p_value, 1.0);
  EXPECT_EQ(r1.significant, r1.p_value <= 0.05);

  EXPECT_THROW(bootstrap_significance(a, b, refs, 0), Error);
  EXPECT_THROW(bootstrap_significance(a, {"x"}, refs, 10), Error);
  EXPECT_THROW(bootstrap_significance({}, {}, {}, 10), Error);
  EXPECT_THROW(bootstrap_significance(a, b, refs, 10, 0.0), Error);
  EXPECT_THROW(bootstrap_significance(a, b, refs, 10, 1.0), Error);
}
