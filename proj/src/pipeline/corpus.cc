#include "subchar/pipeline/corpus.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subchar/random.h"
#include "subchar/text.h"

namespace subchar::pipeline {

namespace {

void check_utf8(const std::string& line, const std::string& where) {
  try {
    code_points(line);
  } catch (const EncodingError& e) {
    throw EncodingError(where + ": invalid UTF-8 at byte " + std::to_string(e.byte_offset()), e.byte_offset());
  }
}

void add_pair(ParallelCorpus& c, const std::string& src, const std::string& tgt, bool char_split) {
  SentencePair p{normalize_line(src, char_split), normalize_line(tgt, char_split)};
  if (p.src.empty() || p.tgt.empty()) {
    ++c.dropped_empty;
    return;
  }
  c.pairs.push_back(std::move(p));
}

ParallelCorpus subset(const ParallelCorpus& corpus, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  ParallelCorpus out;
  out.origin = corpus.origin;
  for (std::size_t i : idx) out.pairs.push_back(corpus.pairs[i]);
  return out;
}

}  // namespace

std::string normalize_line(const std::string& line, bool char_split) {
  check_utf8(line, "line");
  std::vector<std::string> toks;
  for (auto& w : split_whitespace(line)) {
    if (!char_split) {
      toks.push_back(std::move(w));
      continue;
    }
    for (auto& g : split_graphemes(w)) toks.push_back(std::move(g));
  }
  return join(toks, " ");
}

ParallelCorpus ingest_lines(const std::vector<std::string>& src, const std::vector<std::string>& tgt,
                            const IngestOptions& options) {
  if (src.size() != tgt.size()) {
    throw Error("line count mismatch: " + std::to_string(src.size()) + " source vs " + std::to_string(tgt.size()) +
                " target");
  }
  ParallelCorpus c;
  for (std::size_t i = 0; i < src.size(); ++i) {
    check_utf8(src[i], "source line " + std::to_string(i + 1));
    check_utf8(tgt[i], "target line " + std::to_string(i + 1));
    add_pair(c, src[i], tgt[i], options.char_split);
  }
  return c;
}

ParallelCorpus ingest_tsv_lines(const std::vector<std::string>& lines, const IngestOptions& options) {
  ParallelCorpus c;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    check_utf8(lines[i], where);
    if (trim(lines[i]).empty()) {
      ++c.dropped_empty;
      continue;
    }
    const auto cols = subchar::split(lines[i], '\t');
    if (cols.size() != 2) throw Error(where + ": expected 2 tab-separated columns, found " + std::to_string(cols.size()));
    add_pair(c, cols[0], cols[1], options.char_split);
  }
  return c;
}

ParallelCorpus ingest_files(const std::string& src_path, const std::string& tgt_path, const IngestOptions& options) {
  ParallelCorpus c = ingest_lines(read_lines(src_path), read_lines(tgt_path), options);
  c.origin = src_path + " + " + tgt_path;
  return c;
}

ParallelCorpus ingest_tsv(const std::string& path, const IngestOptions& options) {
  ParallelCorpus c = ingest_tsv_lines(read_lines(path), options);
  c.origin = path;
  return c;
}

void write_corpus(const ParallelCorpus& corpus, const std::string& src_path, const std::string& tgt_path) {
  write_lines(src_path, sources(corpus));
  write_lines(tgt_path, targets(corpus));
}

std::vector<std::string> sources(const ParallelCorpus& corpus) {
  std::vector<std::string> out;
  for (const auto& p : corpus.pairs) out.push_back(p.src);
  return out;
}

std::vector<std::string> targets(const ParallelCorpus& corpus) {
  std::vector<std::string> out;
  for (const auto& p : corpus.pairs) out.push_back(p.tgt);
  return out;
}

Splits split(const ParallelCorpus& corpus, std::size_t dev_n, std::size_t test_n, uint64_t seed) {
  if (dev_n + test_n >= corpus.size()) {
    throw Error("corpus of " + std::to_string(corpus.size()) + " pairs is too small for " + std::to_string(dev_n) +
                " dev + " + std::to_string(test_n) + " test");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto at = [&](std::size_t k) { return order.begin() + static_cast<std::ptrdiff_t>(k); };
  Splits s;
  s.test = subset(corpus, std::vector<std::size_t>(at(0), at(test_n)));
  s.dev = subset(corpus, std::vector<std::size_t>(at(test_n), at(test_n + dev_n)));
  s.train = subset(corpus, std::vector<std::size_t>(at(test_n + dev_n), order.end()));
  return s;
}

FilterResult length_filter(const ParallelCorpus& corpus, double coverage, const PairLength& length) {
  if (corpus.pairs.empty()) throw Error("cannot length-filter an empty corpus");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw Error("coverage must be in (0, 1]");
  std::vector<std::size_t> lens;
  lens.reserve(corpus.size());
  for (const auto& p : corpus.pairs) lens.push_back(length(p));
  std::vector<std::size_t> sorted = lens;
  std::sort(sorted.begin(), sorted.end());
  // Smallest k with k / n >= coverage; the slack absorbs binary rounding of coverage * n.
  auto k = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(sorted.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  FilterResult r;
  r.max_len = sorted[k - 1];
  r.corpus.origin = corpus.origin;
  r.corpus.dropped_empty = corpus.dropped_empty;
  for (std::size_t i = 0; i < lens.size(); ++i) {
    if (lens[i] <= r.max_len) r.corpus.pairs.push_back(corpus.pairs[i]);
    else ++r.dropped;
  }
  return r;
}

}  // namespace subchar::pipeline
