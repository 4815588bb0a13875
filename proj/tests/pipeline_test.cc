#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "subchar/pipeline/config.h"
#include "subchar/pipeline/corpus.h"
#include "subchar/pipeline/experiment.h"
#include "subchar/pipeline/granularity.h"
#include "subchar/pipeline/stats.h"
#include "subchar/pipeline/synthetic.h"
#include "subchar/text.h"

using namespace subchar;
using namespace subchar::pipeline;
namespace fs = std::filesystem;

namespace {

const DecompositionTable& sample() {
  static const DecompositionTable t = DecompositionTable::load_file(SUBCHAR_DATA_DIR "/sample_table.tsv");
  return t;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("subchar_pipeline_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ParallelCorpus numbered(std::size_t n) {
  std::vector<std::string> s, t;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back("s" + std::to_string(i));
    t.push_back("t" + std::to_string(i));
  }
  return ingest_lines(s, t);
}

ExperimentConfig tiny_run(const fs::path& dir) {
  const auto corpus = toy_copy_corpus(sample(), 30, 3);
  write_corpus(corpus, (dir / "toy.src").string(), (dir / "toy.tgt").string());
  ExperimentConfig c;
  c.src_path = (dir / "toy.src").string();
  c.tgt_path = (dir / "toy.tgt").string();
  c.table_path = SUBCHAR_DATA_DIR "/sample_table.tsv";
  c.bpe_vocab = 120;
  c.dev_size = 2;
  c.test_size = 4;
  c.dims = nmt::Dims{8, 8, 2, 8, true};
  c.train.total_steps = 15;
  c.train.batch_size = 4;
  c.train.log_every = 5;
  c.eval_train = true;
  c.out_dir = (dir / "run").string();
  return c;
}

}  // namespace

TEST(Config, ParsesFlatFiles) {
  const auto m = parse_config("# comment\n\nsrc = a.txt\n  beam=3  \n");
  EXPECT_EQ(m.at("src"), "a.txt");
  EXPECT_EQ(m.at("beam"), "3");
  EXPECT_THROW(parse_config("no equals sign\n"), Error);
  EXPECT_EQ(parse_config(format_config(m)), m);
}

TEST(Config, RoundTripsThroughMap) {
  auto c = ExperimentConfig::from_map({{"tsv", "data.tsv"},
                                       {"table", "t.tsv"},
                                       {"src_level", "stroke"},
                                       {"tgt_level", "char"},
                                       {"hidden", "24"},
                                       {"steps", "77"},
                                       {"forget_bias", "0.5"},
                                       {"seed", "9"}},
                                      "/base");
  EXPECT_EQ(c.tsv_path, "/base/data.tsv");
  EXPECT_EQ(c.src_level, Granularity::StrokeBpe);
  EXPECT_EQ(c.dims.hidden, 24);
  EXPECT_EQ(c.train.total_steps, 77);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.dims.forget_bias, 0.5);
  EXPECT_NO_THROW(c.validate());
  const auto again = ExperimentConfig::from_map(c.to_map());
  EXPECT_EQ(again.hash(), c.hash());
  c.out_dir = "elsewhere";
  EXPECT_EQ(again.hash(), c.hash());
  c.dims.hidden = 25;
  EXPECT_NE(again.hash(), c.hash());
  EXPECT_THROW(ExperimentConfig::from_map({{"tsv", "x"}, {"hiden", "3"}}), Error);
  EXPECT_THROW(ExperimentConfig::from_map({{"tsv", "x"}, {"hidden", "three"}}), Error);
}

TEST(Config, SharedVocabNeedsMatchingLevels) {
  ExperimentConfig c;
  c.tsv_path = "x.tsv";
  c.table_path = "t.tsv";
  c.shared_vocab = true;
  c.src_level = Granularity::IdeographBpe;
  c.tgt_level = Granularity::CharBpe;
  EXPECT_THROW(c.validate(), Error);
  c.tgt_level = Granularity::IdeographBpe;
  EXPECT_NO_THROW(c.validate());
  c.table_path.clear();
  EXPECT_THROW(c.validate(), Error);
}

TEST(Ingest, MatchedFilesAndErrors) {
  const auto dir = scratch("ingest");
  write_file((dir / "a").string(), "木 林\n森\n驰 池\n");
  write_file((dir / "b").string(), "x\ny  z\nw\n");
  const auto c = ingest_files((dir / "a").string(), (dir / "b").string());
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.pairs[1].tgt, "y z");
  write_file((dir / "short").string(), "x\ny\n");
  EXPECT_THROW(ingest_files((dir / "a").string(), (dir / "short").string()), Error);
  write_file((dir / "bad").string(), "x\n\xff\nz\n");
  EXPECT_THROW(ingest_files((dir / "a").string(), (dir / "bad").string()), EncodingError);
  EXPECT_THROW(ingest_files((dir / "missing").string(), (dir / "b").string()), Error);
}

TEST(Ingest, TsvDropsEmptySides) {
  const auto c = ingest_tsv_lines({"a b\tc", "d\t", "e\tf"});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.dropped_empty, 1u);
  EXPECT_THROW(ingest_tsv_lines({"a\tb\tc"}), Error);
  EXPECT_THROW(ingest_tsv_lines({"ab"}), Error);
}

TEST(Ingest, CharSplit) {
  EXPECT_EQ(normalize_line("森林 AI", true), "森 林 A I");
  EXPECT_EQ(normalize_line("  森林\t AI ", false), "森林 AI");
}

TEST(Split, DisjointAndSeeded) {
  const auto c = numbered(100);
  const auto s = split(c, 10, 10, 7);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.dev.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
  std::set<std::string> seen;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& p : part->pairs) EXPECT_TRUE(seen.insert(p.src).second);
  }
  EXPECT_EQ(seen.size(), 100u);
  const auto again = split(c, 10, 10, 7);
  EXPECT_EQ(again.test.pairs, s.test.pairs);
  EXPECT_NE(split(c, 10, 10, 8).test.pairs, s.test.pairs);
  EXPECT_THROW(split(c, 50, 50, 1), Error);
}

TEST(LengthFilter, PercentileCutoff) {
  std::vector<std::string> s, t;
  for (int i = 1; i <= 10; ++i) {
    std::string line;
    for (int k = 0; k < i; ++k) line += (k ? " x" : "x");
    s.push_back(line);
    t.push_back("y");
  }
  const auto c = ingest_lines(s, t);
  const auto words = [](const SentencePair& p) {
    return std::max(split_whitespace(p.src).size(), split_whitespace(p.tgt).size());
  };
  const auto r = length_filter(c, 0.9, words);
  EXPECT_EQ(r.max_len, 9u);
  EXPECT_EQ(r.dropped, 1u);
  EXPECT_EQ(r.corpus.size(), 9u);
  const auto all = length_filter(c, 1.0, words);
  EXPECT_EQ(all.max_len, 10u);
  EXPECT_EQ(all.dropped, 0u);
  const auto flat = length_filter(numbered(5), 0.9, words);
  EXPECT_EQ(flat.max_len, 1u);
  EXPECT_EQ(flat.dropped, 0u);
}

TEST(Transform, Examples) {
  EXPECT_EQ(SideCodec(Granularity::Char, nullptr).base("森林"), (std::vector<std::string>{"森", "林"}));
  EXPECT_EQ(SideCodec(Granularity::Word, nullptr).base("森林"), (std::vector<std::string>{"森林"}));
  const auto ideo = SideCodec(Granularity::IdeographBpe, &sample()).base("森林");
  EXPECT_EQ(ideo, (std::vector<std::string>{"木", "木", "木", "</c0>", "木", "木", "</c0>"}));
  EXPECT_EQ(SideCodec(Granularity::Char, nullptr).base("森林 木"),
            (std::vector<std::string>{"森", "林", "▁", "木"}));
  EXPECT_THROW(SideCodec(Granularity::StrokeBpe, nullptr), Error);
}

TEST(Transform, InvertibleAtEveryLevelWithBpe) {
  const auto corpus = toy_copy_corpus(sample(), 200, 5);
  std::vector<std::string> lines = sources(corpus);
  lines.push_back("NMT 驰 \\@<▁ の");
  for (Granularity g : {Granularity::Word, Granularity::Char, Granularity::CharBpe, Granularity::IdeographBpe,
                        Granularity::StrokeBpe}) {
    SideCodec codec(g, &sample());
    if (uses_bpe(g)) {
      std::vector<bpe::TokenStream> base;
      for (const auto& l : lines) base.push_back(codec.base(l));
      codec.set_bpe(bpe::train(base, bpe::train(base, 100000).base_symbols().size() + 40));
    }
    for (const auto& l : lines) EXPECT_EQ(codec.decode(codec.encode(l)), l) << to_string(g) << ": " << l;
  }
}

TEST(Transform, OutputDecodingIsLenient) {
  const SideCodec codec(Granularity::IdeographBpe, &sample());
  EXPECT_EQ(codec.decode_output({"木", "木", "</c0>", "▁", "<unk>"}), std::string("林 ") + kUnknownGrapheme);
  EXPECT_EQ(codec.decode_output({"木", "木"}), kUnknownGrapheme);
  EXPECT_THROW(codec.decode({"木", "木"}), Error);
  EXPECT_EQ(SideCodec(Granularity::Word, nullptr).decode_output({"a", "<unk>"}), "a <unk>");
}

TEST(Stats, SampleCorpusCompresses) {
  const auto lines = read_lines(SUBCHAR_DATA_DIR "/sample_corpus.txt");
  const auto r = stats_report(lines, &sample());
  ASSERT_EQ(r.levels.size(), 4u);
  EXPECT_EQ(r.levels[0].level, "word");
  EXPECT_LT(r.levels[2].components, r.levels[1].vocab);
  EXPECT_LT(r.levels[3].components, r.levels[2].components);
  EXPECT_GE(r.levels[1].avg_length, r.levels[0].avg_length);
  EXPECT_NE(r.csv().find("level,"), std::string::npos);
  EXPECT_FALSE(r.table().empty());
}

TEST(Stats, EmptyCorpusGivesZeros) {
  const auto r = stats_report({}, &sample());
  EXPECT_EQ(r.sentences, 0u);
  for (const auto& l : r.levels) {
    EXPECT_EQ(l.vocab, 0u);
    EXPECT_EQ(l.tokens, 0u);
    EXPECT_EQ(l.avg_length, 0.0);
  }
  EXPECT_EQ(stats_report({"a"}, nullptr).levels.size(), 2u);
}

TEST(Synthetic, ToyCorpusIsCopyTask) {
  const auto c = toy_copy_corpus(sample(), 50, 1);
  ASSERT_EQ(c.size(), 50u);
  std::set<std::string> distinct;
  for (const auto& p : c.pairs) {
    EXPECT_EQ(p.src, p.tgt);
    distinct.insert(p.src);
    for (const auto& g : split_graphemes(p.src)) EXPECT_TRUE(g == " " || sample().find(g)) << g;
  }
  EXPECT_EQ(distinct.size(), 50u);
  EXPECT_EQ(toy_copy_corpus(sample(), 50, 1).pairs, c.pairs);
}

TEST(Synthetic, SharedRadicalTaskHoldsOutCombinations) {
  SharedRadicalOptions o;
  o.train_pairs = 300;
  o.test_pairs = 40;
  const auto task = shared_radical_task(o);
  const auto table = DecompositionTable::parse(task.table_tsv);
  std::set<std::string> train_chars;
  for (const auto& p : task.train.pairs) {
    for (const auto& g : split_graphemes(p.src)) train_chars.insert(g);
  }
  std::size_t unseen = 0;
  for (const auto& p : task.test.pairs) {
    for (const auto& g : split_graphemes(p.src)) {
      if (g == " ") continue;
      EXPECT_TRUE(table.find(g));
      unseen += train_chars.count(g) == 0;
    }
  }
  EXPECT_GE(unseen, task.test.size());
  EXPECT_EQ(task.train.size(), 300u);
  EXPECT_EQ(task.test.size(), 40u);
}

TEST(Experiment, RunsEndToEndAndReruns) {
  const auto dir = scratch("run");
  const auto config = tiny_run(dir);
  const auto rep = run_experiment(config);
  EXPECT_EQ(rep.ingested, 30u);
  EXPECT_EQ(rep.test_pairs, 4u);
  EXPECT_EQ(rep.steps, 15);
  ASSERT_TRUE(rep.test_bleu.has_value());
  ASSERT_TRUE(rep.train_accuracy.has_value());
  for (const char* f : {"manifest.json", "report.json", "report.csv", "report.txt", "loss.csv", "model.ckpt",
                        "output/test.hyp"}) {
    EXPECT_TRUE(fs::exists(fs::path(config.out_dir) / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(read_file(rep.manifest_path));
  EXPECT_EQ(manifest.at("seed"), 1);
  EXPECT_FALSE(manifest.at("artifacts").empty());

  const auto again = rerun_manifest(rep.manifest_path, (dir / "rerun").string());
  EXPECT_EQ(read_file((dir / "rerun" / "output" / "test.hyp").string()),
            read_file((fs::path(config.out_dir) / "output" / "test.hyp").string()));
  EXPECT_EQ(read_file((dir / "rerun" / "model.ckpt").string()),
            read_file((fs::path(config.out_dir) / "model.ckpt").string()));
  EXPECT_EQ(again.final_loss, rep.final_loss);

  std::string text = read_file(rep.manifest_path);
  text.replace(text.find("\"hidden\": \"8\""), 13, "\"hidden\": \"9\"");
  write_file((dir / "tampered.json").string(), text);
  EXPECT_THROW(config_from_manifest((dir / "tampered.json").string()), Error);
  fs::remove_all(dir);
}

TEST(Experiment, ErrorsNameTheirStage) {
  const auto dir = scratch("stage");
  auto config = tiny_run(dir);
  const auto stage_of = [](const ExperimentConfig& c) {
    try {
      run_experiment(c);
    } catch (const StageError& e) {
      return e.stage();
    }
    return std::string("none");
  };
  auto missing_table = config;
  missing_table.table_path = (dir / "nope.tsv").string();
  EXPECT_EQ(stage_of(missing_table), "table");
  auto missing_src = config;
  missing_src.src_path = (dir / "nope.src").string();
  EXPECT_EQ(stage_of(missing_src), "ingest");
  auto too_small = config;
  too_small.dev_size = 20;
  too_small.test_size = 20;
  EXPECT_EQ(stage_of(too_small), "split");
  auto bad = config;
  bad.shared_vocab = true;
  bad.tgt_level = Granularity::Char;
  EXPECT_EQ(stage_of(bad), "config");
  fs::remove_all(dir);
}
