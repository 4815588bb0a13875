#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subchar/text.h"

namespace subchar::bpe {

// A stream of atom tokens (see tokens.h) with "▁" between words. After apply,
// tokens are pieces: concatenated atoms, "@@"-suffixed unless they end a word.
using TokenStream = std::vector<std::string>;

struct MergeRule {
  std::string left;
  std::string right;
  std::string merged;
  std::size_t rank = 0;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

/// Ordered merge rules over a base alphabet. The vocabulary is the base
/// alphabet plus one merged symbol per rule.
class BpeModel {
 public:
  BpeModel() = default;
  BpeModel(std::vector<std::string> base_symbols, std::vector<MergeRule> rules,
           std::size_t vocab_size_target);

  const std::vector<MergeRule>& rules() const { return rules_; }
  const std::vector<std::string>& base_symbols() const { return base_; }
  std::size_t vocab_size_target() const { return target_; }
  std::size_t vocab_size() const { return base_.size() + rules_.size(); }
  std::optional<std::size_t> rank_of(const std::string& left, const std::string& right) const;

  /// Model file: a header line "#bpe-model<TAB>base size<TAB>target", one
  /// "#base<TAB>symbol" line per base symbol, then "left<TAB>right" per rule
  /// in rank order.
  std::string serialize() const;
  static BpeModel parse(std::string_view text);
  void save_file(const std::string& path) const;
  static BpeModel load_file(const std::string& path);

 private:
  std::vector<std::string> base_;
  std::vector<MergeRule> rules_;
  std::size_t target_ = 0;
  std::map<std::pair<std::string, std::string>, std::size_t> ranks_;
};

/// Greedy merge learning. Each step merges the most frequent adjacent pair
/// inside words (ties: lexicographically smallest (left, right)), skipping
/// pairs whose merged label already exists. Stops at `target_vocab` symbols or
/// when no pair occurs at least twice.
BpeModel train(const std::vector<TokenStream>& corpus, std::size_t target_vocab);

/// One model over the concatenation of both corpora.
BpeModel train_shared(const std::vector<TokenStream>& source, const std::vector<TokenStream>& target,
                      std::size_t target_vocab);

TokenStream apply(const BpeModel& model, const TokenStream& stream);

struct DesegmentOptions {
  // Drop a continuation marker left dangling at a word end instead of throwing.
  bool lenient = false;
};

/// Splits pieces back into atoms. desegment(apply(m, s)) == s.
TokenStream desegment(const TokenStream& stream, const DesegmentOptions& options = {});

struct VocabEntry {
  std::string symbol;
  std::size_t frequency = 0;
  bool merged = false;
};

struct VocabReport {
  std::vector<VocabEntry> entries;  // base symbols first, then merges in rank order
  std::size_t base_count = 0;
  std::size_t merged_count = 0;
};

/// Final vocabulary with its frequencies in the segmented `corpus`.
VocabReport vocab_report(const BpeModel& model, const std::vector<TokenStream>& corpus);

}  // namespace subchar::bpe
