#include "subchar/pipeline/synthetic.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "subchar/random.h"
#include "subchar/text.h"

namespace subchar::pipeline {

namespace {

constexpr char32_t kRadicalBase = 0x2F00;  // Kangxi radicals
constexpr char32_t kCharBase = 0x3400;     // CJK extension A
constexpr char32_t kStrokeBase = 0x31C0;   // CJK strokes
constexpr std::size_t kStrokeTypes = 24;

std::string cp(char32_t c) { return encode_code_point(c); }

// Splits characters into words of one or two.
std::string sentence_of(const std::vector<std::string>& chars, Rng& rng) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < chars.size()) {
    const std::size_t len = std::min<std::size_t>(chars.size() - i, 1 + rng.index(2));
    std::string w;
    for (std::size_t k = 0; k < len; ++k) w += chars[i + k];
    words.push_back(std::move(w));
    i += len;
  }
  return join(words, " ");
}

}  // namespace

ParallelCorpus toy_copy_corpus(const DecompositionTable& table, std::size_t pairs, uint64_t seed) {
  if (table.size() == 0) throw Error("toy corpus needs a non-empty table");
  Rng rng(seed);
  ParallelCorpus c;
  c.origin = "toy-copy";
  std::set<std::string> seen;
  while (c.pairs.size() < pairs) {
    std::vector<std::string> words(2 + rng.index(3));
    for (auto& w : words) {
      const std::size_t len = 1 + rng.index(2);
      for (std::size_t k = 0; k < len; ++k) w += table.entries()[rng.index(table.size())].character;
    }
    std::string s = join(words, " ");
    if (!seen.insert(s).second) continue;
    c.pairs.push_back({s, s});
  }
  return c;
}

SyntheticTask shared_radical_task(const SharedRadicalOptions& o) {
  const std::size_t combos = o.left * o.right;
  if (o.left == 0 || o.right == 0) throw Error("component inventories must be non-empty");
  if (o.held_out == 0 || o.held_out >= combos) throw Error("held_out must be in [1, left*right)");
  if (2 * (o.left + o.right) > 214) throw Error("too many components");
  Rng rng(o.seed);

  // Component inventories: source left/right, target left/right.
  std::vector<std::string> radicals;
  for (char32_t r = 0; r < 2 * (o.left + o.right); ++r) radicals.push_back(cp(kRadicalBase + r));
  const auto at = [&](std::size_t i) { return radicals[i]; };
  std::vector<std::string> src_left, src_right, tgt_left, tgt_right;
  for (std::size_t i = 0; i < o.left; ++i) src_left.push_back(at(i));
  for (std::size_t i = 0; i < o.right; ++i) src_right.push_back(at(o.left + i));
  for (std::size_t i = 0; i < o.left; ++i) tgt_left.push_back(at(o.left + o.right + i));
  for (std::size_t i = 0; i < o.right; ++i) tgt_right.push_back(at(2 * o.left + o.right + i));
  // Component maps are fixed random bijections.
  std::vector<std::size_t> f(o.left), g(o.right);
  std::iota(f.begin(), f.end(), 0);
  std::iota(g.begin(), g.end(), 0);
  rng.shuffle(f);
  rng.shuffle(g);

  std::map<std::string, std::vector<std::string>> strokes;
  for (const auto& r : radicals) {
    std::vector<std::string> s(2 + rng.index(3));
    for (auto& x : s) x = cp(kStrokeBase + static_cast<char32_t>(rng.index(kStrokeTypes)));
    strokes[r] = s;
  }

  const auto src_char = [&](std::size_t k) { return cp(kCharBase + static_cast<char32_t>(k)); };
  const auto tgt_char = [&](std::size_t k) { return cp(kCharBase + static_cast<char32_t>(combos + k)); };
  // Combination k = a * right + b.
  std::string tsv = "# synthetic shared-radical table\n";
  for (std::size_t a = 0; a < o.left; ++a) {
    for (std::size_t b = 0; b < o.right; ++b) {
      const std::size_t k = a * o.right + b;
      const auto row = [&](const std::string& ch, const std::string& l, const std::string& r) {
        std::vector<std::string> st = strokes[l];
        st.insert(st.end(), strokes[r].begin(), strokes[r].end());
        tsv += ch + "\t\xE2\xBF\xB0 " + l + " " + r + "\t" + join(st, " ") + "\n";
      };
      row(src_char(k), src_left[a], src_right[b]);
      row(tgt_char(k), tgt_left[f[a]], tgt_right[g[b]]);
    }
  }
  const auto translate = [&](std::size_t k) { return f[k / o.right] * o.right + g[k % o.right]; };

  // Held-out combinations: no component may lose all of its training partners.
  std::vector<std::size_t> order(combos);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<bool> held(combos, false);
  std::vector<std::size_t> left_left(o.left, o.right), right_left(o.right, o.left);
  std::vector<std::size_t> held_list, seen_list;
  for (std::size_t k : order) {
    const std::size_t a = k / o.right, b = k % o.right;
    if (held_list.size() < o.held_out && left_left[a] > 1 && right_left[b] > 1) {
      held[k] = true;
      --left_left[a];
      --right_left[b];
      held_list.push_back(k);
    }
  }
  for (std::size_t k = 0; k < combos; ++k) {
    if (!held[k]) seen_list.push_back(k);
  }

  const auto make_pair = [&](const std::vector<std::size_t>& ks, Rng& r) {
    std::vector<std::string> s, t;
    for (std::size_t k : ks) {
      s.push_back(src_char(k));
      t.push_back(tgt_char(translate(k)));
    }
    // Same word split on both sides.
    Rng a = r;
    const std::string src = sentence_of(s, r);
    const std::string tgt = sentence_of(t, a);
    return SentencePair{src, tgt};
  };

  SyntheticTask task;
  task.table_tsv = tsv;
  task.train.origin = "shared-radical-train";
  task.test.origin = "shared-radical-test";
  while (task.train.pairs.size() < o.train_pairs) {
    std::vector<std::size_t> ks(3 + rng.index(4));
    for (auto& k : ks) k = seen_list[rng.index(seen_list.size())];
    task.train.pairs.push_back(make_pair(ks, rng));
  }
  while (task.test.pairs.size() < o.test_pairs) {
    std::vector<std::size_t> ks(3 + rng.index(4));
    for (auto& k : ks) k = seen_list[rng.index(seen_list.size())];
    const std::size_t novel = std::min<std::size_t>(2, ks.size());
    std::vector<std::size_t> slots(ks.size());
    std::iota(slots.begin(), slots.end(), 0);
    rng.shuffle(slots);
    for (std::size_t i = 0; i < novel; ++i) ks[slots[i]] = held_list[rng.index(held_list.size())];
    task.test.pairs.push_back(make_pair(ks, rng));
  }
  return task;
}

}  // namespace subchar::pipeline
