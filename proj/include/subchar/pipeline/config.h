#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "subchar/nmt/model.h"
#include "subchar/nmt/trainer.h"
#include "subchar/units.h"

namespace subchar::pipeline {

/// Flat "key = value" file. '#' starts a comment line; blank lines are skipped.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::string_view text);
ConfigMap load_config_file(const std::string& path);
std::string format_config(const ConfigMap& config);

struct ExperimentConfig {
  // Corpus: two aligned files or one TSV file.
  std::string src_path;
  std::string tgt_path;
  std::string tsv_path;
  // Optional fixed test set; when set, only the dev set is split off.
  std::string test_src_path;
  std::string test_tgt_path;
  std::string table_path;
  bool char_split = false;

  Granularity src_level = Granularity::IdeographBpe;
  Granularity tgt_level = Granularity::IdeographBpe;
  std::size_t bpe_vocab = 500;
  bool shared_vocab = false;

  std::size_t dev_size = 1000;
  std::size_t test_size = 1000;
  double coverage = 0.9;

  nmt::Dims dims;
  nmt::TrainConfig train;
  int beam = 1;
  int max_decode_len = 0;  // 0: derived from the longest training target

  std::string bleu_tokenize = "word";  // word | char
  bool eval_train = false;
  std::string baseline_hyp;  // optional, for significance against another run
  std::size_t signif_samples = 1000;
  double signif_alpha = 1e-4;

  std::string out_dir = "run";
  uint64_t seed = 1;

  /// Unknown keys and malformed values are errors. Relative paths are
  /// resolved against `base_dir` when it is non-empty.
  static ExperimentConfig from_map(const ConfigMap& map, const std::string& base_dir = "");
  static ExperimentConfig load_file(const std::string& path);
  ConfigMap to_map() const;
  void validate() const;
  /// Hash of every setting except the output directory.
  uint64_t hash() const;
};

}  // namespace subchar::pipeline
