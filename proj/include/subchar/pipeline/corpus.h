#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace subchar::pipeline {

/// Whitespace-tokenized sentence pair, tokens joined by single spaces.
struct SentencePair {
  std::string src;
  std::string tgt;
  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::string origin;              // file(s) the pairs came from
  std::size_t dropped_empty = 0;   // input lines with an empty side
  std::size_t size() const { return pairs.size(); }
};

struct IngestOptions {
  // Treat every grapheme as a token instead of relying on whitespace.
  bool char_split = false;
};

/// Normalizes one line: tokens split on whitespace (or graphemes) and joined
/// with single spaces. Throws EncodingError on invalid UTF-8.
std::string normalize_line(const std::string& line, bool char_split);

ParallelCorpus ingest_files(const std::string& src_path, const std::string& tgt_path,
                            const IngestOptions& options = {});
ParallelCorpus ingest_tsv(const std::string& path, const IngestOptions& options = {});
// In-memory variants used by the file readers.
ParallelCorpus ingest_lines(const std::vector<std::string>& src, const std::vector<std::string>& tgt,
                            const IngestOptions& options = {});
ParallelCorpus ingest_tsv_lines(const std::vector<std::string>& lines, const IngestOptions& options = {});

void write_corpus(const ParallelCorpus& corpus, const std::string& src_path, const std::string& tgt_path);
std::vector<std::string> sources(const ParallelCorpus& corpus);
std::vector<std::string> targets(const ParallelCorpus& corpus);

struct Splits {
  ParallelCorpus train;
  ParallelCorpus dev;
  ParallelCorpus test;
};

/// Seeded selection without replacement. Test takes the first `test_n` of a
/// shuffled index order, dev the next `dev_n`; each split keeps corpus order.
Splits split(const ParallelCorpus& corpus, std::size_t dev_n, std::size_t test_n, uint64_t seed);

using PairLength = std::function<std::size_t(const SentencePair&)>;

struct FilterResult {
  ParallelCorpus corpus;
  std::size_t max_len = 0;
  std::size_t dropped = 0;
};

/// Smallest length L such that at least `coverage` of the pairs have
/// length(pair) <= L; longer pairs are dropped.
FilterResult length_filter(const ParallelCorpus& corpus, double coverage, const PairLength& length);

}  // namespace subchar::pipeline
