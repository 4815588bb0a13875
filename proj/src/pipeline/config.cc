#include "subchar/pipeline/config.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "subchar/text.h"

namespace subchar::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Fields {
 public:
  explicit Fields(const ConfigMap& map) : map_(map) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return map_.count(key) != 0;
  }
  const std::string& str(const std::string& key) {
    used_.insert(key);
    return map_.at(key);
  }

  template <typename T>
  void integer(const std::string& key, T& out) {
    if (!has(key)) return;
    const std::string& s = str(key);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0) bad(key, s);
    if constexpr (std::is_unsigned_v<T>) {
      if (v < 0) bad(key, s);
    }
    out = static_cast<T>(v);
  }
  void real(const std::string& key, double& out) {
    if (!has(key)) return;
    const std::string& s = str(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') bad(key, s);
    out = v;
  }
  void flag(const std::string& key, bool& out) {
    if (!has(key)) return;
    const std::string& s = str(key);
    if (s == "true" || s == "1" || s == "yes") out = true;
    else if (s == "false" || s == "0" || s == "no") out = false;
    else bad(key, s);
  }
  void text(const std::string& key, std::string& out) {
    if (has(key)) out = str(key);
  }
  void path(const std::string& key, std::string& out, const std::string& base) {
    if (!has(key)) return;
    out = str(key);
    if (!out.empty() && !base.empty() && fs::path(out).is_relative()) out = (fs::path(base) / out).lexically_normal().string();
  }

  void check_unused() const {
    for (const auto& [k, _] : map_) {
      if (!used_.count(k)) throw Error("unknown config key '" + k + "'");
    }
  }

 private:
  [[noreturn]] static void bad(const std::string& key, const std::string& value) {
    throw Error("bad value for '" + key + "': '" + value + "'");
  }
  const ConfigMap& map_;
  std::set<std::string> used_;
};

}  // namespace

ConfigMap parse_config(std::string_view text) {
  ConfigMap out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw Error("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw Error("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) { return parse_config(read_file(path)); }

std::string format_config(const ConfigMap& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map, const std::string& base_dir) {
  ExperimentConfig c;
  Fields f(map);
  f.path("src", c.src_path, base_dir);
  f.path("tgt", c.tgt_path, base_dir);
  f.path("tsv", c.tsv_path, base_dir);
  f.path("test_src", c.test_src_path, base_dir);
  f.path("test_tgt", c.test_tgt_path, base_dir);
  f.path("table", c.table_path, base_dir);
  f.flag("char_split", c.char_split);
  if (f.has("src_level")) c.src_level = parse_granularity(f.str("src_level"));
  if (f.has("tgt_level")) c.tgt_level = parse_granularity(f.str("tgt_level"));
  f.integer("bpe_vocab", c.bpe_vocab);
  f.flag("shared_vocab", c.shared_vocab);
  f.integer("dev_size", c.dev_size);
  f.integer("test_size", c.test_size);
  f.real("coverage", c.coverage);
  f.integer("embedding", c.dims.embedding);
  f.integer("hidden", c.dims.hidden);
  f.integer("layers", c.dims.layers);
  f.integer("attention", c.dims.attention);
  f.flag("normalize_attention", c.dims.normalize_attention);
  f.real("forget_bias", c.dims.forget_bias);
  f.real("learning_rate", c.train.learning_rate);
  f.integer("steps", c.train.total_steps);
  f.integer("batch_size", c.train.batch_size);
  f.real("dropout", c.train.dropout);
  f.real("clip_norm", c.train.clip_norm);
  f.integer("log_every", c.train.log_every);
  f.integer("beam", c.beam);
  f.integer("max_decode_len", c.max_decode_len);
  f.text("bleu_tokenize", c.bleu_tokenize);
  f.flag("eval_train", c.eval_train);
  f.path("baseline_hyp", c.baseline_hyp, base_dir);
  f.integer("signif_samples", c.signif_samples);
  f.real("signif_alpha", c.signif_alpha);
  f.path("out_dir", c.out_dir, base_dir);
  f.integer("seed", c.seed);
  f.check_unused();
  c.train.seed = c.seed;
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  const fs::path base = fs::absolute(path).parent_path();
  return from_map(load_config_file(path), base.string());
}

ConfigMap ExperimentConfig::to_map() const {
  ConfigMap m;
  auto put = [&](const std::string& k, const std::string& v) {
    if (!v.empty()) m[k] = v;
  };
  put("src", src_path);
  put("tgt", tgt_path);
  put("tsv", tsv_path);
  put("test_src", test_src_path);
  put("test_tgt", test_tgt_path);
  put("table", table_path);
  m["char_split"] = char_split ? "true" : "false";
  m["src_level"] = to_string(src_level);
  m["tgt_level"] = to_string(tgt_level);
  m["bpe_vocab"] = std::to_string(bpe_vocab);
  m["shared_vocab"] = shared_vocab ? "true" : "false";
  m["dev_size"] = std::to_string(dev_size);
  m["test_size"] = std::to_string(test_size);
  m["coverage"] = fmt_double(coverage);
  m["embedding"] = std::to_string(dims.embedding);
  m["hidden"] = std::to_string(dims.hidden);
  m["layers"] = std::to_string(dims.layers);
  m["attention"] = std::to_string(dims.attention);
  m["normalize_attention"] = dims.normalize_attention ? "true" : "false";
  m["forget_bias"] = fmt_double(dims.forget_bias);
  m["learning_rate"] = fmt_double(train.learning_rate);
  m["steps"] = std::to_string(train.total_steps);
  m["batch_size"] = std::to_string(train.batch_size);
  m["dropout"] = fmt_double(train.dropout);
  m["clip_norm"] = fmt_double(train.clip_norm);
  m["log_every"] = std::to_string(train.log_every);
  m["beam"] = std::to_string(beam);
  m["max_decode_len"] = std::to_string(max_decode_len);
  m["bleu_tokenize"] = bleu_tokenize;
  m["eval_train"] = eval_train ? "true" : "false";
  put("baseline_hyp", baseline_hyp);
  m["signif_samples"] = std::to_string(signif_samples);
  m["signif_alpha"] = fmt_double(signif_alpha);
  m["out_dir"] = out_dir;
  m["seed"] = std::to_string(seed);
  return m;
}

void ExperimentConfig::validate() const {
  const bool two_file = !src_path.empty() || !tgt_path.empty();
  if (two_file && !tsv_path.empty()) throw Error("config: give either src/tgt or tsv, not both");
  if (!two_file && tsv_path.empty()) throw Error("config: no corpus given (src/tgt or tsv)");
  if (two_file && (src_path.empty() || tgt_path.empty())) throw Error("config: src and tgt go together");
  if (test_src_path.empty() != test_tgt_path.empty()) throw Error("config: test_src and test_tgt go together");
  if (shared_vocab && src_level != tgt_level) {
    throw Error("config: shared_vocab needs the same granularity on both sides (" + to_string(src_level) +
                " vs " + to_string(tgt_level) + ")");
  }
  if ((uses_table(src_level) || uses_table(tgt_level)) && table_path.empty()) {
    throw Error("config: a decomposition table is required for the ideograph and stroke levels");
  }
  if ((uses_bpe(src_level) || uses_bpe(tgt_level)) && bpe_vocab == 0) throw Error("config: bpe_vocab must be positive");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw Error("config: coverage must be in (0, 1]");
  if (beam < 1) throw Error("config: beam must be at least 1");
  if (max_decode_len < 0) throw Error("config: max_decode_len must be non-negative");
  if (bleu_tokenize != "word" && bleu_tokenize != "char") throw Error("config: bleu_tokenize is word or char");
  if (signif_samples == 0) throw Error("config: signif_samples must be positive");
  if (!std::isfinite(dims.forget_bias)) throw Error("config: forget_bias must be finite");
  if (dims.embedding <= 0 || dims.hidden <= 0 || dims.layers <= 0 || dims.attention < 0) {
    throw Error("config: model dimensions must be positive");
  }
  if (out_dir.empty()) throw Error("config: out_dir is empty");
  nmt::TrainConfig t = train;
  t.validate();
}

uint64_t ExperimentConfig::hash() const {
  ConfigMap m = to_map();
  m.erase("out_dir");
  return fnv1a64(format_config(m));
}

}  // namespace subchar::pipeline
