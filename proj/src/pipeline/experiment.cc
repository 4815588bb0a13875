#include "subchar/pipeline/experiment.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>

#include "json.hpp"

#include "subchar/bpe.h"
#include "subchar/decomposition.h"
#include "subchar/nmt/checkpoint.h"
#include "subchar/nmt/decoder.h"
#include "subchar/nmt/trainer.h"
#include "subchar/nmt/vocab.h"
#include "subchar/pipeline/corpus.h"
#include "subchar/pipeline/granularity.h"
#include "subchar/text.h"
#include "subchar/tokens.h"

namespace subchar::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <typename Fn>
auto stage(const std::string& name, std::ostream* log, Fn&& fn) -> decltype(fn()) {
  if (log) *log << "[" << name << "]\n" << std::flush;
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

using TokenCorpus = std::vector<std::vector<std::string>>;

TokenCorpus encode_all(const SideCodec& codec, const std::vector<std::string>& sentences) {
  TokenCorpus out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(codec.encode(s));
  return out;
}

TokenCorpus base_all(const SideCodec& codec, const std::vector<std::string>& sentences) {
  TokenCorpus out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(codec.base(s));
  return out;
}

std::vector<std::string> lines_of(const TokenCorpus& c) {
  std::vector<std::string> out;
  out.reserve(c.size());
  for (const auto& s : c) out.push_back(join(s, " "));
  return out;
}

std::vector<nmt::Example> examples(const nmt::Vocab& sv, const nmt::Vocab& tv, const TokenCorpus& src,
                                   const TokenCorpus& tgt) {
  std::vector<nmt::Example> out;
  for (std::size_t i = 0; i < src.size(); ++i) out.push_back({sv.encode(src[i]), tv.encode(tgt[i])});
  return out;
}

json bleu_json(const eval::BleuResult& b) {
  return {{"score", b.score}, {"precisions", b.precisions}, {"brevity_penalty", b.brevity_penalty},
          {"hyp_len", b.hyp_len}, {"ref_len", b.ref_len}};
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

class Artifacts {
 public:
  explicit Artifacts(fs::path root) : root_(std::move(root)) {}

  std::string path(const std::string& rel) const { return (root_ / rel).string(); }

  void lines(const std::string& name, const std::string& rel, const std::vector<std::string>& content) {
    fs::create_directories((root_ / rel).parent_path());
    write_lines(path(rel), content);
    record(name, rel);
  }
  void text(const std::string& name, const std::string& rel, const std::string& content) {
    fs::create_directories((root_ / rel).parent_path());
    write_file(path(rel), content);
    record(name, rel);
  }
  void record(const std::string& name, const std::string& rel) {
    entries_[name] = {{"path", rel}, {"fnv1a64", hex64(fnv1a64(read_file(path(rel))))}};
  }
  const json& entries() const { return entries_; }

 private:
  fs::path root_;
  json entries_ = json::object();
};

}  // namespace

std::string ExperimentReport::json() const {
  nlohmann::json j;
  j["ingested"] = ingested;
  j["dropped_empty"] = dropped_empty;
  j["train_pairs"] = train_pairs;
  j["dev_pairs"] = dev_pairs;
  j["test_pairs"] = test_pairs;
  j["filtered_out"] = filtered_out;
  j["max_len"] = max_len;
  j["src_bpe_vocab"] = src_bpe_vocab;
  j["tgt_bpe_vocab"] = tgt_bpe_vocab;
  j["src_vocab"] = src_vocab;
  j["tgt_vocab"] = tgt_vocab;
  j["parameters"] = parameters;
  j["steps"] = steps;
  j["final_loss"] = final_loss;
  if (test_bleu) j["test_bleu"] = bleu_json(*test_bleu);
  if (train_bleu) j["train_bleu"] = bleu_json(*train_bleu);
  if (train_accuracy) j["train_accuracy"] = *train_accuracy;
  if (significance) {
    const auto& s = *significance;
    j["significance"] = {{"samples", s.samples}, {"wins_a", s.wins_a}, {"wins_b", s.wins_b}, {"ties", s.ties},
                         {"bleu_a", s.bleu_a}, {"bleu_b", s.bleu_b}, {"p_value", s.p_value},
                         {"alpha", s.alpha}, {"significant", s.significant}};
  }
  j["seconds"] = seconds;
  j["manifest"] = manifest_path;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::csv() const {
  std::string head = "train_pairs,test_pairs,max_len,src_vocab,tgt_vocab,parameters,steps,final_loss";
  std::string row = std::to_string(train_pairs) + "," + std::to_string(test_pairs) + "," + std::to_string(max_len) +
                    "," + std::to_string(src_vocab) + "," + std::to_string(tgt_vocab) + "," +
                    std::to_string(parameters) + "," + std::to_string(steps) + "," + fmt(final_loss, 6);
  if (test_bleu) {
    head += ",test_bleu";
    row += "," + fmt(test_bleu->score, 4);
  }
  if (train_bleu) {
    head += ",train_bleu";
    row += "," + fmt(train_bleu->score, 4);
  }
  if (train_accuracy) {
    head += ",train_accuracy";
    row += "," + fmt(*train_accuracy, 6);
  }
  if (significance) {
    head += ",p_value";
    row += "," + fmt(significance->p_value, 6);
  }
  return head + "\n" + row + "\n";
}

std::string ExperimentReport::text() const {
  std::string out;
  out += "pairs        train " + std::to_string(train_pairs) + "  dev " + std::to_string(dev_pairs) + "  test " +
         std::to_string(test_pairs) + "  (dropped empty " + std::to_string(dropped_empty) + ", over length " +
         std::to_string(filtered_out) + ", max_len " + std::to_string(max_len) + ")\n";
  out += "vocab        src " + std::to_string(src_vocab) + "  tgt " + std::to_string(tgt_vocab) + "\n";
  out += "model        " + std::to_string(parameters) + " parameters, " + std::to_string(steps) +
         " steps, final loss " + fmt(final_loss, 4) + "\n";
  if (test_bleu) {
    out += "test BLEU    " + fmt(test_bleu->score) + "  (BP " + fmt(test_bleu->brevity_penalty, 3) + ", hyp/ref " +
           std::to_string(test_bleu->hyp_len) + "/" + std::to_string(test_bleu->ref_len) + ")\n";
  }
  if (train_bleu) out += "train BLEU   " + fmt(train_bleu->score) + "\n";
  if (train_accuracy) out += "train acc    " + fmt(*train_accuracy, 4) + "\n";
  if (significance) {
    out += "signif       p = " + fmt(significance->p_value, 4) + " at alpha " + fmt(significance->alpha, 4) +
           (significance->significant ? " (significant)\n" : " (not significant)\n");
  }
  out += "time         " + fmt(seconds, 1) + " s\n";
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  stage("config", log, [&] { config.validate(); });
  ExperimentReport rep;
  const fs::path root(config.out_dir);
  fs::create_directories(root);
  Artifacts art(root);

  std::optional<DecompositionTable> table;
  if (uses_table(config.src_level) || uses_table(config.tgt_level)) {
    table = stage("table", log, [&] { return DecompositionTable::load_file(config.table_path); });
  }
  const DecompositionTable* tab = table ? &*table : nullptr;

  const IngestOptions ingest_opts{config.char_split};
  ParallelCorpus corpus = stage("ingest", log, [&] {
    return config.tsv_path.empty() ? ingest_files(config.src_path, config.tgt_path, ingest_opts)
                                   : ingest_tsv(config.tsv_path, ingest_opts);
  });
  rep.ingested = corpus.size();
  rep.dropped_empty = corpus.dropped_empty;

  Splits splits = stage("split", log, [&] {
    if (config.test_src_path.empty()) return split(corpus, config.dev_size, config.test_size, config.seed);
    Splits s = split(corpus, config.dev_size, 0, config.seed);
    s.test = ingest_files(config.test_src_path, config.test_tgt_path, ingest_opts);
    if (s.test.pairs.empty()) throw Error("test set is empty");
    return s;
  });

  SideCodec src_codec(config.src_level, tab), tgt_codec(config.tgt_level, tab);

  const FilterResult filtered = stage("filter", log, [&] {
    return length_filter(splits.train, config.coverage, [&](const SentencePair& p) {
      return std::max(src_codec.base(p.src).size(), tgt_codec.base(p.tgt).size());
    });
  });
  splits.train = filtered.corpus;
  rep.max_len = filtered.max_len;
  rep.filtered_out = filtered.dropped;
  rep.train_pairs = splits.train.size();
  rep.dev_pairs = splits.dev.size();
  rep.test_pairs = splits.test.size();
  stage("write-corpus", log, [&] {
    for (const auto& [name, part] : {std::pair<std::string, const ParallelCorpus*>{"train", &splits.train},
                                     {"dev", &splits.dev},
                                     {"test", &splits.test}}) {
      art.lines(name + ".src", "corpus/" + name + ".src", sources(*part));
      art.lines(name + ".tgt", "corpus/" + name + ".tgt", targets(*part));
    }
  });

  const auto train_src_text = sources(splits.train), train_tgt_text = targets(splits.train);
  stage("bpe", log, [&] {
    const bool src_bpe = uses_bpe(config.src_level), tgt_bpe = uses_bpe(config.tgt_level);
    if (config.shared_vocab && src_bpe) {
      bpe::BpeModel m = bpe::train_shared(base_all(src_codec, train_src_text), base_all(tgt_codec, train_tgt_text),
                                          config.bpe_vocab);
      art.text("bpe.shared", "bpe/shared.model", m.serialize());
      src_codec.set_bpe(m);
      tgt_codec.set_bpe(std::move(m));
    } else {
      if (src_bpe) {
        bpe::BpeModel m = bpe::train(base_all(src_codec, train_src_text), config.bpe_vocab);
        art.text("bpe.src", "bpe/src.model", m.serialize());
        src_codec.set_bpe(std::move(m));
      }
      if (tgt_bpe) {
        bpe::BpeModel m = bpe::train(base_all(tgt_codec, train_tgt_text), config.bpe_vocab);
        art.text("bpe.tgt", "bpe/tgt.model", m.serialize());
        tgt_codec.set_bpe(std::move(m));
      }
    }
    if (src_codec.bpe()) rep.src_bpe_vocab = src_codec.bpe()->vocab_size();
    if (tgt_codec.bpe()) rep.tgt_bpe_vocab = tgt_codec.bpe()->vocab_size();
  });

  TokenCorpus train_src, train_tgt, test_src;
  stage("transform", log, [&] {
    train_src = encode_all(src_codec, train_src_text);
    train_tgt = encode_all(tgt_codec, train_tgt_text);
    test_src = encode_all(src_codec, sources(splits.test));
    art.lines("train.src.tok", "tokens/train.src", lines_of(train_src));
    art.lines("train.tgt.tok", "tokens/train.tgt", lines_of(train_tgt));
    art.lines("dev.src.tok", "tokens/dev.src", lines_of(encode_all(src_codec, sources(splits.dev))));
    art.lines("dev.tgt.tok", "tokens/dev.tgt", lines_of(encode_all(tgt_codec, targets(splits.dev))));
    art.lines("test.src.tok", "tokens/test.src", lines_of(test_src));
    art.lines("test.tgt.tok", "tokens/test.tgt", lines_of(encode_all(tgt_codec, targets(splits.test))));
  });

  nmt::Vocab src_vocab, tgt_vocab;
  stage("vocab", log, [&] {
    if (config.shared_vocab) {
      TokenCorpus both = train_src;
      both.insert(both.end(), train_tgt.begin(), train_tgt.end());
      src_vocab = tgt_vocab = nmt::Vocab::build(both);
    } else {
      src_vocab = nmt::Vocab::build(train_src);
      tgt_vocab = nmt::Vocab::build(train_tgt);
    }
    art.lines("vocab.src", "vocab/src.vocab", src_vocab.symbols());
    art.lines("vocab.tgt", "vocab/tgt.vocab", tgt_vocab.symbols());
  });
  rep.src_vocab = src_vocab.size();
  rep.tgt_vocab = tgt_vocab.size();

  const auto train_ex = examples(src_vocab, tgt_vocab, train_src, train_tgt);
  nmt::Checkpoint ckpt{nmt::init_model(config.dims, static_cast<int>(src_vocab.size()),
                                       static_cast<int>(tgt_vocab.size()), config.shared_vocab, config.seed),
                       src_vocab, tgt_vocab, 0};
  rep.parameters = ckpt.model.parameter_count();
  stage("train", log, [&] {
    std::string curve = "step,loss,lr\n";
    const nmt::TrainResult tr = nmt::train(ckpt.model, train_ex, config.train, [&](const nmt::LossPoint& p) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(p.step), p.loss, p.lr);
      curve += buf;
      if (log) *log << "  step " << p.step << " loss " << fmt(p.loss, 4) << "\n" << std::flush;
    });
    ckpt.step = tr.steps;
    rep.steps = tr.steps;
    rep.final_loss = tr.curve.empty() ? 0.0 : tr.curve.back().loss;
    art.text("loss", "loss.csv", curve);
    nmt::save_checkpoint(art.path("model.ckpt"), ckpt);
    art.record("model", "model.ckpt");
  });

  std::size_t longest = 1;
  for (const auto& t : train_tgt) longest = std::max(longest, t.size());
  nmt::TranslateOptions topts;
  topts.beam = config.beam;
  topts.max_len = config.max_decode_len > 0 ? config.max_decode_len : static_cast<int>(2 * longest + 10);
  const auto translate_all = [&](const TokenCorpus& src, std::vector<std::string>* raw) {
    std::vector<std::string> hyps;
    for (const auto& s : src) {
      const auto toks = tgt_vocab.decode(nmt::translate(ckpt.model, src_vocab.encode(s), topts));
      if (raw) raw->push_back(join(toks, " "));
      hyps.push_back(tgt_codec.decode_output(toks));
    }
    return hyps;
  };

  eval::BleuOptions bopts;
  if (config.bleu_tokenize == "char") bopts.tokenizer = eval::char_tokenizer;
  std::vector<std::string> test_hyps;
  stage("translate", log, [&] {
    std::vector<std::string> raw;
    test_hyps = translate_all(test_src, &raw);
    art.lines("test.hyp.tok", "output/test.hyp.tok", raw);
    art.lines("test.hyp", "output/test.hyp", test_hyps);
  });
  if (!test_hyps.empty()) {
    stage("bleu", log, [&] { rep.test_bleu = eval::bleu(test_hyps, targets(splits.test), bopts); });
  }

  if (config.eval_train) {
    stage("eval-train", log, [&] {
      const auto hyps = translate_all(train_src, nullptr);
      art.lines("train.hyp", "output/train.hyp", hyps);
      rep.train_bleu = eval::bleu(hyps, train_tgt_text, bopts);
      rep.train_accuracy = nmt::token_accuracy(ckpt.model, train_ex);
    });
  }
  if (!config.baseline_hyp.empty() && !test_hyps.empty()) {
    stage("signif", log, [&] {
      rep.significance = eval::bootstrap_significance(test_hyps, read_lines(config.baseline_hyp),
                                                      targets(splits.test), config.signif_samples,
                                                      config.signif_alpha, config.seed, bopts);
    });
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stage("report", log, [&] {
    art.text("report.csv", "report.csv", rep.csv());
    art.text("report.txt", "report.txt", rep.text());
    rep.manifest_path = art.path("manifest.json");
    write_file(art.path("report.json"), rep.json());
    json m;
    m["format"] = "subchar-experiment-manifest";
    m["version"] = 1;
    m["config"] = config.to_map();
    m["config_hash"] = hex64(config.hash());
    m["seed"] = config.seed;
    m["artifacts"] = art.entries();
    m["report"] = "report.json";
    write_file(rep.manifest_path, m.dump(2) + "\n");
  });
  return rep;
}

ExperimentConfig config_from_manifest(const std::string& manifest_path) {
  const json m = json::parse(read_file(manifest_path));
  if (m.value("format", "") != "subchar-experiment-manifest") throw Error(manifest_path + ": not an experiment manifest");
  ConfigMap map;
  for (const auto& [k, v] : m.at("config").items()) map[k] = v.get<std::string>();
  ExperimentConfig c = ExperimentConfig::from_map(map);
  if (hex64(c.hash()) != m.at("config_hash").get<std::string>()) throw Error(manifest_path + ": config hash mismatch");
  return c;
}

ExperimentReport rerun_manifest(const std::string& manifest_path, const std::string& out_dir, std::ostream* log) {
  ExperimentConfig c = config_from_manifest(manifest_path);
  if (!out_dir.empty()) c.out_dir = out_dir;
  return run_experiment(c, log);
}

}  // namespace subchar::pipeline
