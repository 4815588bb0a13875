// Command-line front end: one subcommand per pipeline stage, plus `run` for a
// full experiment.
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "subchar/bpe.h"
#include "subchar/decomposition.h"
#include "subchar/eval.h"
#include "subchar/nmt/checkpoint.h"
#include "subchar/nmt/decoder.h"
#include "subchar/nmt/trainer.h"
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
using json = nlohmann::json;

namespace {

using TokenLines = std::vector<std::vector<std::string>>;

TokenLines read_tokens(const std::string& path) {
  TokenLines out;
  for (const auto& line : read_lines(path)) out.push_back(split_whitespace(line));
  return out;
}

void write_tokens(const std::string& path, const TokenLines& lines) {
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(join(l, " "));
  write_lines(path, out);
}

std::optional<DecompositionTable> maybe_table(const std::string& path, Granularity a, Granularity b) {
  if (path.empty()) {
    if (uses_table(a) || uses_table(b)) throw Error("--table is required for the ideograph and stroke levels");
    return std::nullopt;
  }
  return DecompositionTable::load_file(path);
}

std::string bleu_text(const eval::BleuResult& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "BLEU = %.2f, %.1f/%.1f/%.1f/%.1f (BP=%.3f, hyp_len=%zu, ref_len=%zu)", b.score,
                b.precisions.size() > 0 ? 100 * b.precisions[0] : 0.0, b.precisions.size() > 1 ? 100 * b.precisions[1] : 0.0,
                b.precisions.size() > 2 ? 100 * b.precisions[2] : 0.0, b.precisions.size() > 3 ? 100 * b.precisions[3] : 0.0,
                b.brevity_penalty, b.hyp_len, b.ref_len);
  return buf;
}

json bleu_json(const eval::BleuResult& b) {
  return {{"score", b.score}, {"precisions", b.precisions}, {"brevity_penalty", b.brevity_penalty},
          {"hyp_len", b.hyp_len}, {"ref_len", b.ref_len}};
}

eval::BleuOptions bleu_options(const std::string& tokenize, bool smooth) {
  eval::BleuOptions o;
  if (tokenize == "char") o.tokenizer = eval::char_tokenizer;
  else if (tokenize != "word") throw Error("--tokenize is word or char");
  o.smoothing = smooth;
  return o;
}

// Training settings taken from a flat config file; command-line flags win.
struct TrainSettings {
  std::string src, tgt, model;
  bool shared = false;
  nmt::Dims dims;
  nmt::TrainConfig train;
};

void apply_train_config(const std::string& path, TrainSettings& s) {
  ConfigMap m = load_config_file(path);
  const fs::path base = fs::absolute(path).parent_path();
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    std::string v = it->second;
    m.erase(it);
    return v;
  };
  auto as_path = [&](const std::string& v) { return fs::path(v).is_relative() ? (base / v).string() : v; };
  if (auto v = take("src")) s.src = as_path(*v);
  if (auto v = take("tgt")) s.tgt = as_path(*v);
  if (auto v = take("model")) s.model = as_path(*v);
  // Remaining keys share their meaning with experiment configs; anything the
  // trainer does not use is rejected there.
  ConfigMap rest;
  for (const char* key : {"shared_vocab", "embedding", "hidden", "layers", "attention", "normalize_attention", "forget_bias",
                          "learning_rate", "steps", "batch_size", "dropout", "clip_norm", "log_every", "seed"}) {
    if (auto v = take(key)) rest[key] = *v;
  }
  if (!m.empty()) throw Error("unknown training config key '" + m.begin()->first + "'");
  rest["tsv"] = "-";
  ExperimentConfig c = ExperimentConfig::from_map(rest);
  s.shared = c.shared_vocab;
  s.dims = c.dims;
  s.train = c.train;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-character tokenization and NMT experiment tools"};
  app.require_subcommand(1);

  // ingest
  std::string in_src, in_tgt, in_tsv, out_src, out_tgt;
  bool char_split = false;
  auto* ingest = app.add_subcommand("ingest", "Read a parallel corpus, normalize whitespace, drop empty pairs");
  ingest->add_option("--src", in_src, "Source sentences");
  ingest->add_option("--tgt", in_tgt, "Target sentences");
  ingest->add_option("--tsv", in_tsv, "source<TAB>target lines");
  ingest->add_flag("--char-split", char_split, "One token per grapheme");
  ingest->add_option("--out-src", out_src)->required();
  ingest->add_option("--out-tgt", out_tgt)->required();

  // split
  std::size_t dev_n = 1000, test_n = 1000;
  uint64_t seed = 1;
  std::string out_dir;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/dev/test split");
  split_cmd->add_option("--src", in_src)->required();
  split_cmd->add_option("--tgt", in_tgt)->required();
  split_cmd->add_option("--dev", dev_n);
  split_cmd->add_option("--test", test_n);
  split_cmd->add_option("--seed", seed);
  split_cmd->add_option("--out-dir", out_dir)->required();

  // filter
  double coverage = 0.9;
  std::string src_level = "char", tgt_level = "char", level = "char", table_path;
  auto* filter = app.add_subcommand("filter", "Drop pairs longer than the coverage percentile");
  filter->add_option("--src", in_src)->required();
  filter->add_option("--tgt", in_tgt)->required();
  filter->add_option("--coverage", coverage);
  filter->add_option("--src-level", src_level);
  filter->add_option("--tgt-level", tgt_level);
  filter->add_option("--table", table_path);
  filter->add_option("--out-src", out_src)->required();
  filter->add_option("--out-tgt", out_tgt)->required();

  // transform
  std::string input, output;
  bool inverse = false, lenient = false;
  auto* transform = app.add_subcommand("transform", "Sentences to base token streams at a granularity (or back)");
  transform->add_option("--input", input)->required();
  transform->add_option("--output", output)->required();
  transform->add_option("--level", level);
  transform->add_option("--table", table_path);
  transform->add_flag("--inverse", inverse, "Token streams back to sentences");
  transform->add_flag("--lenient", lenient);

  // bpe-train
  std::vector<std::string> inputs;
  std::size_t bpe_vocab = 500;
  std::string model_path, report_path;
  auto* bpe_train = app.add_subcommand("bpe-train", "Learn BPE merges; two inputs train one shared model");
  bpe_train->add_option("--input", inputs, "Base token stream file(s)")->required()->expected(1, 2);
  bpe_train->add_option("--vocab", bpe_vocab);
  bpe_train->add_option("--output", model_path)->required();
  bpe_train->add_option("--report", report_path, "Vocabulary CSV");

  auto* bpe_apply = app.add_subcommand("bpe-apply", "Segment a token stream with a BPE model");
  bpe_apply->add_option("--model", model_path)->required();
  bpe_apply->add_option("--input", input)->required();
  bpe_apply->add_option("--output", output)->required();

  auto* deseg = app.add_subcommand("desegment", "Undo BPE segmentation");
  deseg->add_option("--input", input)->required();
  deseg->add_option("--output", output)->required();
  deseg->add_flag("--lenient", lenient);

  // decode: BPE pieces or base tokens back to sentences
  auto* decode = app.add_subcommand("decode", "Model-side tokens back to sentences");
  decode->add_option("--input", input)->required();
  decode->add_option("--output", output)->required();
  decode->add_option("--level", level);
  decode->add_option("--table", table_path);
  decode->add_flag("--lenient", lenient, "Substitute U+FFFD for undecodable spans");

  // train
  TrainSettings ts;
  std::string config_path;
  int64_t steps = -1;
  auto* train = app.add_subcommand("train", "Train a translation model on token files");
  train->add_option("--config", config_path, "Flat key = value file");
  train->add_option("--src", ts.src);
  train->add_option("--tgt", ts.tgt);
  train->add_option("--model", ts.model);
  train->add_option("--steps", steps);

  int beam = 1, max_len = 100;
  auto* translate = app.add_subcommand("translate", "Translate token lines with a trained model");
  translate->add_option("--model", model_path)->required();
  translate->add_option("--input", input)->required();
  translate->add_option("--output", output)->required();
  translate->add_option("--beam", beam);
  translate->add_option("--max-len", max_len);

  std::string hyp, hyp_b, ref, tokenize = "word", json_path;
  bool smooth = false;
  auto* bleu = app.add_subcommand("bleu", "Corpus BLEU");
  bleu->add_option("--hyp", hyp)->required();
  bleu->add_option("--ref", ref)->required();
  bleu->add_option("--tokenize", tokenize);
  bleu->add_flag("--smooth", smooth);
  bleu->add_option("--json", json_path);

  std::size_t samples = 1000;
  double alpha = 1e-4;
  auto* signif = app.add_subcommand("signif", "Paired bootstrap significance");
  signif->add_option("--hyp-a", hyp)->required();
  signif->add_option("--hyp-b", hyp_b)->required();
  signif->add_option("--ref", ref)->required();
  signif->add_option("--samples", samples);
  signif->add_option("--alpha", alpha);
  signif->add_option("--seed", seed);
  signif->add_option("--tokenize", tokenize);
  signif->add_option("--json", json_path);

  std::string csv_path;
  auto* stats = app.add_subcommand("stats", "Vocabulary and length statistics per granularity");
  stats->add_option("--input", input)->required();
  stats->add_option("--table", table_path);
  stats->add_option("--csv", csv_path);

  std::string manifest_path;
  auto* run = app.add_subcommand("run", "Full experiment from a config or a manifest");
  run->add_option("--config", config_path);
  run->add_option("--manifest", manifest_path);
  run->add_option("--out-dir", out_dir, "Override the output directory");

  std::size_t pairs = 50;
  auto* synth = app.add_subcommand("synth", "Generate synthetic corpora");
  synth->require_subcommand(1);
  auto* toy = synth->add_subcommand("toy", "Copy corpus over table characters");
  toy->add_option("--table", table_path)->required();
  toy->add_option("--pairs", pairs);
  toy->add_option("--seed", seed);
  toy->add_option("--out-src", out_src)->required();
  toy->add_option("--out-tgt", out_tgt)->required();
  SharedRadicalOptions sro;
  auto* radical = synth->add_subcommand("radical", "Shared-radical translation task with held-out characters");
  radical->add_option("--train", sro.train_pairs);
  radical->add_option("--test", sro.test_pairs);
  radical->add_option("--held-out", sro.held_out);
  radical->add_option("--seed", sro.seed);
  radical->add_option("--out-dir", out_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const IngestOptions o{char_split};
      if (in_tsv.empty() == (in_src.empty() || in_tgt.empty())) throw Error("give --src and --tgt, or --tsv");
      const ParallelCorpus c = in_tsv.empty() ? ingest_files(in_src, in_tgt, o) : ingest_tsv(in_tsv, o);
      write_corpus(c, out_src, out_tgt);
      std::cout << "pairs " << c.size() << "\ndropped_empty " << c.dropped_empty << "\n";
    } else if (*split_cmd) {
      const Splits s = split(ingest_files(in_src, in_tgt), dev_n, test_n, seed);
      fs::create_directories(out_dir);
      for (const auto& [name, part] : {std::pair<const char*, const ParallelCorpus*>{"train", &s.train},
                                       {"dev", &s.dev},
                                       {"test", &s.test}}) {
        write_corpus(*part, out_dir + "/" + name + ".src", out_dir + "/" + name + ".tgt");
        std::cout << name << " " << part->size() << "\n";
      }
    } else if (*filter) {
      const Granularity sl = parse_granularity(src_level), tl = parse_granularity(tgt_level);
      const auto table = maybe_table(table_path, sl, tl);
      const DecompositionTable* t = table ? &*table : nullptr;
      const SideCodec sc(sl, t), tc(tl, t);
      const FilterResult r = length_filter(ingest_files(in_src, in_tgt), coverage, [&](const SentencePair& p) {
        return std::max(sc.base(p.src).size(), tc.base(p.tgt).size());
      });
      write_corpus(r.corpus, out_src, out_tgt);
      std::cout << "max_len " << r.max_len << "\nkept " << r.corpus.size() << "\ndropped " << r.dropped << "\n";
    } else if (*transform) {
      const Granularity g = parse_granularity(level);
      const auto table = maybe_table(table_path, g, g);
      const SideCodec codec(g, table ? &*table : nullptr);
      std::vector<std::string> out;
      for (const auto& line : read_lines(input)) {
        out.push_back(inverse ? codec.unbase(split_whitespace(line), lenient) : join(codec.base(line), " "));
      }
      write_lines(output, out);
    } else if (*bpe_train) {
      bpe::BpeModel m = inputs.size() == 2 ? bpe::train_shared(read_tokens(inputs[0]), read_tokens(inputs[1]), bpe_vocab)
                                           : bpe::train(read_tokens(inputs[0]), bpe_vocab);
      m.save_file(model_path);
      std::cout << "base " << m.base_symbols().size() << "\nmerges " << m.rules().size() << "\nvocab "
                << m.vocab_size() << "\n";
      if (!report_path.empty()) {
        TokenLines all;
        for (const auto& in : inputs) {
          for (auto& l : read_tokens(in)) all.push_back(bpe::apply(m, l));
        }
        const bpe::VocabReport r = bpe::vocab_report(m, all);
        std::string csv = "symbol,frequency,merged\n";
        for (const auto& e : r.entries) csv += e.symbol + "," + std::to_string(e.frequency) + "," + (e.merged ? "1" : "0") + "\n";
        write_file(report_path, csv);
      }
    } else if (*bpe_apply) {
      const bpe::BpeModel m = bpe::BpeModel::load_file(model_path);
      TokenLines out;
      for (const auto& l : read_tokens(input)) out.push_back(bpe::apply(m, l));
      write_tokens(output, out);
    } else if (*deseg) {
      TokenLines out;
      for (const auto& l : read_tokens(input)) out.push_back(bpe::desegment(l, {lenient}));
      write_tokens(output, out);
    } else if (*decode) {
      const Granularity g = parse_granularity(level);
      const auto table = maybe_table(table_path, g, g);
      const SideCodec codec(g, table ? &*table : nullptr);
      std::vector<std::string> out;
      for (const auto& l : read_tokens(input)) {
        // Pieces are desegmented first; plain atom streams pass through unchanged.
        const auto atoms = uses_bpe(g) ? bpe::desegment(l, {lenient}) : l;
        out.push_back(lenient ? codec.decode_output(atoms) : codec.unbase(atoms));
      }
      write_lines(output, out);
    } else if (*train) {
      TrainSettings s;
      if (!config_path.empty()) apply_train_config(config_path, s);
      if (!ts.src.empty()) s.src = ts.src;
      if (!ts.tgt.empty()) s.tgt = ts.tgt;
      if (!ts.model.empty()) s.model = ts.model;
      if (steps >= 0) s.train.total_steps = steps;
      if (s.src.empty() || s.tgt.empty() || s.model.empty()) throw Error("train needs src, tgt and model");
      const TokenLines src = read_tokens(s.src), tgt = read_tokens(s.tgt);
      if (src.size() != tgt.size()) throw Error("source and target token files differ in length");
      nmt::Vocab sv, tv;
      if (s.shared) {
        TokenLines both = src;
        both.insert(both.end(), tgt.begin(), tgt.end());
        sv = tv = nmt::Vocab::build(both);
      } else {
        sv = nmt::Vocab::build(src);
        tv = nmt::Vocab::build(tgt);
      }
      std::vector<nmt::Example> ex;
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i].empty() && tgt[i].empty()) continue;
        ex.push_back({sv.encode(src[i]), tv.encode(tgt[i])});
      }
      nmt::Checkpoint ck{nmt::init_model(s.dims, static_cast<int>(sv.size()), static_cast<int>(tv.size()), s.shared,
                                         s.train.seed),
                         sv, tv, 0};
      const auto r = nmt::train(ck.model, ex, s.train, [](const nmt::LossPoint& p) {
        std::cout << "step " << p.step << " loss " << p.loss << " lr " << p.lr << "\n" << std::flush;
      });
      ck.step = r.steps;
      nmt::save_checkpoint(s.model, ck);
    } else if (*translate) {
      const nmt::Checkpoint ck = nmt::load_checkpoint(model_path);
      std::vector<std::string> out;
      for (const auto& l : read_tokens(input)) {
        out.push_back(join(ck.tgt_vocab.decode(nmt::translate(ck.model, ck.src_vocab.encode(l), {beam, max_len})), " "));
      }
      write_lines(output, out);
    } else if (*bleu) {
      const auto r = eval::bleu(read_lines(hyp), read_lines(ref), bleu_options(tokenize, smooth));
      std::cout << bleu_text(r) << "\n";
      if (!json_path.empty()) write_file(json_path, bleu_json(r).dump(2) + "\n");
    } else if (*signif) {
      const auto r = eval::bootstrap_significance(read_lines(hyp), read_lines(hyp_b), read_lines(ref), samples, alpha,
                                                  seed, bleu_options(tokenize, false));
      std::cout << "BLEU A " << r.bleu_a << "  B " << r.bleu_b << "\nwins A " << r.wins_a << "  B " << r.wins_b
                << "  ties " << r.ties << "\np = " << r.p_value << (r.significant ? "  significant" : "  not significant")
                << " at alpha " << r.alpha << "\n";
      if (!json_path.empty()) {
        const json j = {{"samples", r.samples}, {"wins_a", r.wins_a}, {"wins_b", r.wins_b}, {"ties", r.ties},
                        {"bleu_a", r.bleu_a}, {"bleu_b", r.bleu_b}, {"p_value", r.p_value}, {"alpha", r.alpha},
                        {"significant", r.significant}};
        write_file(json_path, j.dump(2) + "\n");
      }
    } else if (*stats) {
      std::optional<DecompositionTable> table;
      if (!table_path.empty()) table = DecompositionTable::load_file(table_path);
      const StatsReport r = stats_report(read_lines(input), table ? &*table : nullptr);
      std::cout << r.table();
      if (!csv_path.empty()) write_file(csv_path, r.csv());
    } else if (*run) {
      if (config_path.empty() == manifest_path.empty()) throw Error("give exactly one of --config and --manifest");
      ExperimentReport r;
      if (!manifest_path.empty()) {
        r = rerun_manifest(manifest_path, out_dir, &std::cerr);
      } else {
        ExperimentConfig c = ExperimentConfig::load_file(config_path);
        if (!out_dir.empty()) c.out_dir = out_dir;
        r = run_experiment(c, &std::cerr);
      }
      std::cout << r.text() << "manifest     " << r.manifest_path << "\n";
    } else if (*toy) {
      const auto c = toy_copy_corpus(DecompositionTable::load_file(table_path), pairs, seed);
      write_corpus(c, out_src, out_tgt);
    } else if (*radical) {
      const SyntheticTask t = shared_radical_task(sro);
      fs::create_directories(out_dir);
      write_file(out_dir + "/table.tsv", t.table_tsv);
      write_corpus(t.train, out_dir + "/train.src", out_dir + "/train.tgt");
      write_corpus(t.test, out_dir + "/test.src", out_dir + "/test.tgt");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
