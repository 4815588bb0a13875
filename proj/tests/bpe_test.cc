#include <gtest/gtest.h>

#include <filesystem>

#include "bpe_oracle.h"
#include "subchar/bpe.h"

using namespace subchar;
using bpe::TokenStream;

namespace {

TokenStream toks(std::initializer_list<const char*> xs) { return TokenStream(xs.begin(), xs.end()); }

}  // namespace

TEST(BpeTrain, MergesMostFrequentPairFirst) {
  const std::vector<TokenStream> corpus{toks({"a", "b", "c", "▁", "a", "b", "▁", "a", "b", "d"})};
  const auto m = bpe::train(corpus, 5);
  ASSERT_EQ(m.rules().size(), 1u);
  EXPECT_EQ(m.rules()[0].merged, "ab");
  EXPECT_EQ(m.base_symbols(), toks({"a", "b", "c", "d"}));
  EXPECT_EQ(m.vocab_size(), 5u);
}

TEST(BpeTrain, TiesBreakOnLabels) {
  const std::vector<TokenStream> corpus{toks({"c", "d", "▁", "c", "d", "▁", "a", "b", "▁", "a", "b"})};
  const auto m = bpe::train(corpus, 5);
  ASSERT_EQ(m.rules().size(), 1u);
  EXPECT_EQ(m.rules()[0].left, "a");
}

TEST(BpeTrain, StopsWhenNoPairRepeats) {
  const std::vector<TokenStream> corpus{toks({"a", "b", "▁", "c", "d"})};
  EXPECT_TRUE(bpe::train(corpus, 100).rules().empty());
}

TEST(BpeTrain, MergedLabelsAreUnique) {
  const std::vector<TokenStream> corpus{toks({"a", "a", "a", "a", "▁", "a", "a", "a", "b", "a"}),
                                        toks({"b", "a", "a", "▁", "a", "b", "a", "a"})};
  const auto m = bpe::train(corpus, 12);
  std::set<std::string> labels(m.base_symbols().begin(), m.base_symbols().end());
  for (const auto& r : m.rules()) EXPECT_TRUE(labels.insert(r.merged).second) << r.merged;
  EXPECT_EQ(oracle::rule_pairs(m), oracle::train(corpus, 12));
}

TEST(BpeTrain, RejectsNonAtoms) {
  EXPECT_THROW(bpe::train({toks({"ab"})}, 10), Error);
  EXPECT_THROW(bpe::train({toks({"<"})}, 10), Error);
  EXPECT_THROW(bpe::train({}, 10), Error);
  EXPECT_THROW(bpe::train({toks({"a", "b", "c"})}, 2), Error);
}

TEST(BpeTrain, MatchesOracleOnRandomCorpora) {
  Rng rng(11);
  for (int c = 0; c < 30; ++c) {
    const auto corpus = oracle::random_corpus(rng, 200, 3 + rng.index(12));
    const std::size_t alphabet = bpe::train(corpus, 1000).base_symbols().size();
    const std::size_t target = alphabet + 1 + rng.index(50);
    const auto m = bpe::train(corpus, target);
    const auto expected = oracle::train(corpus, target);
    ASSERT_EQ(oracle::rule_pairs(m), expected) << "corpus " << c;
    for (const auto& s : corpus) EXPECT_EQ(bpe::apply(m, s), oracle::apply(expected, s));
  }
}

TEST(BpeApply, RoundTripsRandomStreams) {
  Rng rng(5);
  const auto corpus = oracle::random_corpus(rng, 200, 16);
  const auto m = bpe::train(corpus, 60);
  for (int i = 0; i < 1000; ++i) {
    const auto s = oracle::random_stream(rng, 10, 16);
    const auto pieces = bpe::apply(m, s);
    EXPECT_EQ(bpe::desegment(pieces), s);
  }
}

TEST(BpeApply, MarksContinuations) {
  const std::vector<TokenStream> corpus{toks({"a", "b", "c", "▁", "a", "b", "c"})};
  const auto m = bpe::train(corpus, 4);
  EXPECT_EQ(bpe::apply(m, toks({"a", "b", "c", "▁", "c"})), toks({"ab@@", "c", "▁", "c"}));
  EXPECT_EQ(bpe::apply(m, toks({"\\@", "\\@"})), toks({"\\@@@", "\\@"}));
  EXPECT_EQ(bpe::desegment(toks({"\\@@@", "\\@"})), toks({"\\@", "\\@"}));
}

TEST(BpeDesegment, DanglingMarker) {
  EXPECT_THROW(bpe::desegment(toks({"ab@@", "▁", "c"})), Error);
  EXPECT_THROW(bpe::desegment(toks({"ab@@"})), Error);
  EXPECT_EQ(bpe::desegment(toks({"ab@@", "▁", "c"}), {true}), toks({"a", "b", "▁", "c"}));
  EXPECT_THROW(bpe::desegment(toks({"a<"})), Error);
}

TEST(BpeModel, SerializationRoundTrips) {
  Rng rng(3);
  const auto corpus = oracle::random_corpus(rng, 150, 10);
  const auto m = bpe::train(corpus, 40);
  const auto back = bpe::BpeModel::parse(m.serialize());
  EXPECT_EQ(back.rules(), m.rules());
  EXPECT_EQ(back.base_symbols(), m.base_symbols());
  EXPECT_EQ(back.vocab_size_target(), 40u);

  const auto path = std::filesystem::temp_directory_path() / "bpe_test_model.txt";
  m.save_file(path.string());
  EXPECT_EQ(bpe::BpeModel::load_file(path.string()).rules(), m.rules());
  std::filesystem::remove(path);
}

TEST(BpeModel, RejectsMalformedFiles) {
  EXPECT_THROW(bpe::BpeModel::parse("a\tb\n"), Error);
  EXPECT_THROW(bpe::BpeModel::parse("#bpe-model\t1\t5\n#base\ta\na\tb\n"), Error);
  EXPECT_THROW(bpe::BpeModel::parse("#bpe-model\t2\t5\n#base\ta\n"), Error);
  EXPECT_THROW(bpe::BpeModel::parse("#bpe-model\t2\t5\n#base\ta\n#base\tb\na\n"), Error);
}

TEST(BpeShared, TrainsOnBothSides) {
  const std::vector<TokenStream> src{toks({"a", "b"}), toks({"a", "b"})};
  const std::vector<TokenStream> tgt{toks({"c", "d"}), toks({"c", "d"}), toks({"c", "d"})};
  const auto m = bpe::train_shared(src, tgt, 6);
  ASSERT_EQ(m.rules().size(), 2u);
  EXPECT_EQ(m.rules()[0].merged, "cd");
  EXPECT_EQ(m.rules()[1].merged, "ab");
}

TEST(BpeVocab, ReportsFrequencies) {
  const std::vector<TokenStream> corpus{toks({"a", "b", "c", "▁", "a", "b"})};
  const auto m = bpe::train(corpus, 4);
  const auto r = bpe::vocab_report(m, corpus);
  EXPECT_EQ(r.base_count, 3u);
  EXPECT_EQ(r.merged_count, 1u);
  ASSERT_EQ(r.entries.size(), 4u);
  EXPECT_EQ(r.entries[0].symbol, "a");
  EXPECT_EQ(r.entries[0].frequency, 0u);
  EXPECT_EQ(r.entries[2].frequency, 1u);
  EXPECT_EQ(r.entries[3].symbol, "ab");
  EXPECT_EQ(r.entries[3].frequency, 2u);
  EXPECT_TRUE(r.entries[3].merged);
}
