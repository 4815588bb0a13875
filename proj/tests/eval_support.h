#pragma once

#include <string>
#include <vector>

#include "subchar/random.h"

namespace support {

// Random sentences over a small word list.
inline std::vector<std::string> random_sentences(subchar::Rng& rng, std::size_t n) {
  static const std::vector<std::string> words{"the", "cat", "sat", "on", "a", "mat", "dog", "ran",
                                              "to", "big", "red", "house", "in", "park", "we", "saw"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const std::size_t len = 4 + rng.index(8);
    for (std::size_t w = 0; w < len; ++w) s += (w ? " " : "") + words[rng.index(words.size())];
    out.push_back(s);
  }
  return out;
}

// Every word of every sentence pooled, shuffled and dealt back out with the
// original sentence lengths.
inline std::vector<std::string> shuffled_garbage(const std::vector<std::string>& refs, uint64_t seed) {
  std::vector<std::string> pool;
  std::vector<std::size_t> lengths;
  for (const auto& r : refs) {
    std::size_t n = 0, start = 0;
    while (start <= r.size()) {
      const auto end = r.find(' ', start);
      pool.push_back(r.substr(start, end == std::string::npos ? std::string::npos : end - start));
      ++n;
      if (end == std::string::npos) break;
      start = end + 1;
    }
    lengths.push_back(n);
  }
  subchar::Rng rng(seed);
  rng.shuffle(pool);
  std::vector<std::string> out;
  std::size_t at = 0;
  for (std::size_t n : lengths) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + pool[at++];
    out.push_back(s);
  }
  return out;
}

}  // namespace support
