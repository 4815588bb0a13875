#pragma once

#include <cstdint>
#include <string>

#include "subchar/decomposition.h"
#include "subchar/pipeline/corpus.h"

namespace subchar::pipeline {

/// Target = source. Sentences of 2-4 words, each word 1-2 characters drawn
/// from the table.
ParallelCorpus toy_copy_corpus(const DecompositionTable& table, std::size_t pairs, uint64_t seed);

struct SharedRadicalOptions {
  std::size_t train_pairs = 1800;
  std::size_t test_pairs = 200;
  std::size_t left = 10;      // left-component inventory per language
  std::size_t right = 10;     // right-component inventory per language
  std::size_t held_out = 15;  // (left, right) combinations kept out of training
  uint64_t seed = 2018;
};

/// Two logographic languages with compositional characters: source
/// character (a, b) translates to the target character (f(a), g(b)), where f
/// and g are fixed bijections between component inventories. Held-out
/// combinations appear only in the test set, where every sentence contains
/// at least two of them (or one, for single-character sentences).
struct SyntheticTask {
  std::string table_tsv;  // decomposition table covering both languages
  ParallelCorpus train;
  ParallelCorpus test;
};

SyntheticTask shared_radical_task(const SharedRadicalOptions& options = {});

}  // namespace subchar::pipeline
