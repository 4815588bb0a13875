#pragma once

#include <string>
#include <vector>

#include "subchar/decomposition.h"

namespace subchar::pipeline {

struct LevelStats {
  std::string level;
  std::size_t vocab = 0;       // distinct tokens, word boundaries excluded
  std::size_t components = 0;  // distinct table units (ideograph/stroke levels)
  std::size_t tokens = 0;      // boundaries excluded
  double avg_length = 0.0;     // tokens per sentence
  double passthrough_rate = 0.0;
};

struct StatsReport {
  std::size_t sentences = 0;
  std::vector<LevelStats> levels;  // word, char, ideograph, stroke

  std::string csv() const;
  std::string table() const;
};

/// Vocabulary size and sequence length of `sentences` (whitespace-tokenized)
/// at each granularity. The decomposed levels are skipped without a table.
StatsReport stats_report(const std::vector<std::string>& sentences, const DecompositionTable* table);

}  // namespace subchar::pipeline
