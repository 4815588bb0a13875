#pragma once

// Naive reference BPE for cross-checking the incremental trainer. Pair counts
// are recomputed from scratch after every merge, and segmentation applies the
// rules one at a time in rank order.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subchar/bpe.h"
#include "subchar/random.h"
#include "subchar/tokens.h"

namespace oracle {

using Stream = std::vector<std::string>;
using Word = std::vector<std::string>;

inline std::vector<std::pair<Word, long>> words_of(const std::vector<Stream>& corpus) {
  std::map<Word, long> counts;
  for (const auto& s : corpus) {
    Word w;
    for (const auto& t : s) {
      if (t == subchar::tokens::kWordBoundary) {
        if (!w.empty()) ++counts[w];
        w.clear();
      } else {
        w.push_back(t);
      }
    }
    if (!w.empty()) ++counts[w];
  }
  return {counts.begin(), counts.end()};
}

inline Word merge(const Word& w, const std::string& l, const std::string& r) {
  Word out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i + 1 < w.size() && w[i] == l && w[i + 1] == r) {
      out.push_back(l + r);
      ++i;
    } else {
      out.push_back(w[i]);
    }
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> train(const std::vector<Stream>& corpus,
                                                              std::size_t target) {
  auto words = words_of(corpus);
  std::set<std::string> known;
  for (const auto& [w, c] : words) known.insert(w.begin(), w.end());
  const std::size_t alphabet = known.size();
  std::vector<std::pair<std::string, std::string>> rules;
  while (alphabet + rules.size() < target) {
    std::map<std::pair<std::string, std::string>, long> pairs;
    for (const auto& [w, c] : words) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) pairs[{w[i], w[i + 1]}] += c;
    }
    // std::map iterates in (left, right) order, so the first maximum wins ties.
    const std::pair<std::string, std::string>* best = nullptr;
    long best_count = 1;
    for (const auto& [p, c] : pairs) {
      if (c > best_count && !known.count(p.first + p.second)) {
        best = &p;
        best_count = c;
      }
    }
    if (!best) break;
    const auto rule = *best;
    rules.push_back(rule);
    known.insert(rule.first + rule.second);
    for (auto& [w, c] : words) w = merge(w, rule.first, rule.second);
  }
  return rules;
}

inline Stream apply(const std::vector<std::pair<std::string, std::string>>& rules, const Stream& s) {
  Stream out;
  Word w;
  const auto flush = [&] {
    for (const auto& [l, r] : rules) w = merge(w, l, r);
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back(i + 1 < w.size() ? w[i] + "@@" : w[i]);
    w.clear();
  };
  for (const auto& t : s) {
    if (t == subchar::tokens::kWordBoundary) {
      flush();
      out.push_back(t);
    } else {
      w.push_back(t);
    }
  }
  flush();
  return out;
}

// Atoms drawn from a small alphabet that mixes plain graphemes, escaped
// reserved graphemes and end-of-character markers.
inline Stream random_stream(subchar::Rng& rng, std::size_t max_words, std::size_t alphabet) {
  static const std::vector<std::string> pool{"木", "口", "八", "a", "b", "</c0>", "</c1>", "\\@", "\\<",
                                             "马", "也", "㇐", "㇑", "\\▁", "c", "\\\\"};
  const std::size_t n = std::min(alphabet, pool.size());
  Stream s;
  const std::size_t words = 1 + rng.index(max_words);
  for (std::size_t w = 0; w < words; ++w) {
    if (w) s.push_back(std::string(subchar::tokens::kWordBoundary));
    const std::size_t len = 1 + rng.index(6);
    for (std::size_t i = 0; i < len; ++i) s.push_back(pool[rng.index(n)]);
  }
  return s;
}

inline std::vector<Stream> random_corpus(subchar::Rng& rng, std::size_t max_words_total, std::size_t alphabet) {
  std::vector<Stream> corpus;
  std::size_t words = 0;
  while (words < max_words_total) {
    const std::size_t budget = std::min<std::size_t>(8, max_words_total - words);
    corpus.push_back(random_stream(rng, budget, alphabet));
    words += std::count(corpus.back().begin(), corpus.back().end(), "▁") + 1;
  }
  return corpus;
}

inline std::vector<std::pair<std::string, std::string>> rule_pairs(const subchar::bpe::BpeModel& m) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : m.rules()) out.emplace_back(r.left, r.right);
  return out;
}

}  // namespace oracle
