#include "subchar/bpe.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "subchar/tokens.h"

namespace subchar::bpe {

namespace {

using Word = std::vector<std::string>;

bool is_boundary(const std::string& token) { return token == tokens::kWordBoundary; }

void check_atom(const std::string& token) {
  if (!tokens::is_atom(token)) throw Error("BPE input token '" + token + "' is not a single atom");
}

// Word-frequency dictionary of a corpus, in a deterministic order.
std::map<Word, std::size_t> count_words(const std::vector<TokenStream>& corpus) {
  std::map<Word, std::size_t> counts;
  for (const auto& stream : corpus) {
    Word word;
    for (const auto& tok : stream) {
      if (is_boundary(tok)) {
        if (!word.empty()) ++counts[word];
        word.clear();
        continue;
      }
      check_atom(tok);
      word.push_back(tok);
    }
    if (!word.empty()) ++counts[word];
  }
  return counts;
}

// Pair statistics kept in sync with the current segmentation of every word.
class PairTable {
 public:
  struct Key {
    int left;
    int right;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  explicit PairTable(const std::vector<std::string>& labels) : labels_(labels) {}

  void add(int left, int right, long delta, std::size_t word) {
    const Key key{left, right};
    auto& count = counts_[key];
    if (count > 0) ranking_.erase(Ranked{count, key, this});
    count += delta;
    if (count > 0) {
      ranking_.insert(Ranked{count, key, this});
      where_[key].insert(word);
    } else {
      counts_.erase(key);
    }
  }

  const std::set<std::size_t>& words_with(Key key) { return where_[key]; }

  // Best pair by (count desc, left label asc, right label asc) satisfying `ok`.
  template <typename Pred>
  std::optional<std::pair<Key, long>> best(long min_count, Pred ok) const {
    for (const auto& r : ranking_) {
      if (r.count < min_count) return std::nullopt;
      if (ok(r.key)) return std::make_pair(r.key, r.count);
    }
    return std::nullopt;
  }

 private:
  struct Ranked {
    long count;
    Key key;
    const PairTable* owner;
    bool operator<(const Ranked& o) const {
      if (count != o.count) return count > o.count;
      const auto& l = owner->labels_;
      if (key.left != o.key.left) return l[key.left] < l[o.key.left];
      if (key.right != o.key.right) return l[key.right] < l[o.key.right];
      return false;
    }
  };

  const std::vector<std::string>& labels_;
  std::map<Key, long> counts_;
  std::set<Ranked> ranking_;
  std::map<Key, std::set<std::size_t>> where_;
};

template <typename T>
std::vector<T> merge_pair(const std::vector<T>& word, const T& left, const T& right, const T& merged) {
  std::vector<T> out;
  out.reserve(word.size());
  for (std::size_t i = 0; i < word.size();) {
    if (i + 1 < word.size() && word[i] == left && word[i + 1] == right) {
      out.push_back(merged);
      i += 2;
    } else {
      out.push_back(word[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

BpeModel::BpeModel(std::vector<std::string> base_symbols, std::vector<MergeRule> rules,
                   std::size_t vocab_size_target)
    : base_(std::move(base_symbols)), rules_(std::move(rules)), target_(vocab_size_target) {
  std::sort(base_.begin(), base_.end());
  std::set<std::string> vocab(base_.begin(), base_.end());
  if (vocab.size() != base_.size()) throw Error("duplicate base symbol in BPE model");
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    auto& rule = rules_[r];
    if (rule.rank != r) throw Error("BPE rule ranks must be dense");
    if (rule.merged != rule.left + rule.right) throw Error("BPE merged symbol is not the concatenation");
    if (!vocab.count(rule.left) || !vocab.count(rule.right)) {
      throw Error("BPE rule " + std::to_string(r) + " uses an unknown symbol");
    }
    if (!vocab.insert(rule.merged).second) {
      throw Error("BPE merged symbol '" + rule.merged + "' collides with an existing symbol");
    }
    ranks_.emplace(std::make_pair(rule.left, rule.right), r);
  }
}

std::optional<std::size_t> BpeModel::rank_of(const std::string& left, const std::string& right) const {
  const auto it = ranks_.find({left, right});
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

std::string BpeModel::serialize() const {
  std::ostringstream out;
  out << "#bpe-model\t" << base_.size() << '\t' << target_ << '\n';
  for (const auto& b : base_) out << "#base\t" << b << '\n';
  for (const auto& r : rules_) out << r.left << '\t' << r.right << '\n';
  return out.str();
}

BpeModel BpeModel::parse(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0].rfind("#bpe-model\t", 0) != 0) {
    throw Error("BPE model: missing '#bpe-model' header");
  }
  const auto header = split(lines[0], '\t');
  if (header.size() != 3) throw Error("BPE model: malformed header");
  const std::size_t base_size = std::stoul(header[1]);
  const std::size_t target = std::stoul(header[2]);
  std::vector<std::string> base;
  std::vector<MergeRule> rules;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw Error("BPE model line " + std::to_string(i + 1) + ": expected two tab-separated fields");
    }
    if (fields[0] == "#base") {
      if (!rules.empty()) throw Error("BPE model: base symbol after rules");
      base.push_back(fields[1]);
      continue;
    }
    rules.push_back({fields[0], fields[1], fields[0] + fields[1], rules.size()});
  }
  if (base.size() != base_size) throw Error("BPE model: base alphabet size does not match header");
  return BpeModel(std::move(base), std::move(rules), target);
}

void BpeModel::save_file(const std::string& path) const { write_file(path, serialize()); }

BpeModel BpeModel::load_file(const std::string& path) { return parse(read_file(path)); }

BpeModel train(const std::vector<TokenStream>& corpus, std::size_t target_vocab) {
  const auto word_counts = count_words(corpus);
  if (word_counts.empty()) throw Error("cannot train BPE on an empty corpus");

  std::vector<std::string> labels;
  std::unordered_map<std::string, int> ids;
  const auto intern = [&](const std::string& s) {
    auto [it, fresh] = ids.emplace(s, static_cast<int>(labels.size()));
    if (fresh) labels.push_back(s);
    return it->second;
  };

  std::vector<std::vector<int>> words;
  std::vector<long> freq;
  for (const auto& [w, c] : word_counts) {
    std::vector<int> ws;
    for (const auto& a : w) ws.push_back(intern(a));
    words.push_back(std::move(ws));
    freq.push_back(static_cast<long>(c));
  }
  std::vector<std::string> base = labels;
  if (target_vocab < base.size()) {
    throw Error("target vocabulary " + std::to_string(target_vocab) + " is below the alphabet size " +
                std::to_string(base.size()));
  }

  PairTable pairs(labels);
  const auto add_word = [&](std::size_t w, long sign) {
    const auto& ws = words[w];
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) pairs.add(ws[i], ws[i + 1], sign * freq[w], w);
  };
  for (std::size_t w = 0; w < words.size(); ++w) add_word(w, +1);

  std::vector<MergeRule> rules;
  while (base.size() + rules.size() < target_vocab) {
    const auto best = pairs.best(2, [&](PairTable::Key k) {
      return ids.count(labels[k.left] + labels[k.right]) == 0;
    });
    if (!best) break;
    const auto key = best->first;
    const std::string merged_label = labels[key.left] + labels[key.right];
    const int merged = intern(merged_label);
    rules.push_back({labels[key.left], labels[key.right], merged_label, rules.size()});

    const std::vector<std::size_t> affected(pairs.words_with(key).begin(), pairs.words_with(key).end());
    for (std::size_t w : affected) {
      add_word(w, -1);
      words[w] = merge_pair(words[w], key.left, key.right, merged);
      add_word(w, +1);
    }
  }
  return BpeModel(std::move(base), std::move(rules), target_vocab);
}

BpeModel train_shared(const std::vector<TokenStream>& source, const std::vector<TokenStream>& target,
                      std::size_t target_vocab) {
  std::vector<TokenStream> both;
  both.reserve(source.size() + target.size());
  both.insert(both.end(), source.begin(), source.end());
  both.insert(both.end(), target.begin(), target.end());
  return train(both, target_vocab);
}

namespace {

Word segment_word(const BpeModel& model, Word word) {
  while (word.size() > 1) {
    std::optional<std::size_t> best;
    std::size_t at = 0;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      const auto r = model.rank_of(word[i], word[i + 1]);
      if (r && (!best || *r < *best)) {
        best = r;
        at = i;
      }
    }
    if (!best) break;
    const std::string left = word[at], right = word[at + 1];
    word = merge_pair(word, left, right, left + right);
  }
  return word;
}

}  // namespace

TokenStream apply(const BpeModel& model, const TokenStream& stream) {
  TokenStream out;
  out.reserve(stream.size());
  Word word;
  const auto flush = [&] {
    if (word.empty()) return;
    auto pieces = segment_word(model, std::move(word));
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      out.push_back(i + 1 < pieces.size() ? pieces[i] + std::string(tokens::kContinuation)
                                          : std::move(pieces[i]));
    }
    word.clear();
  };
  for (const auto& tok : stream) {
    if (is_boundary(tok)) {
      flush();
      out.push_back(tok);
      continue;
    }
    check_atom(tok);
    word.push_back(tok);
  }
  flush();
  return out;
}

TokenStream desegment(const TokenStream& stream, const DesegmentOptions& options) {
  TokenStream out;
  out.reserve(stream.size());
  bool continued = false;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::string& tok = stream[i];
    if (is_boundary(tok)) {
      if (continued && !options.lenient) {
        throw Error("dangling continuation marker before word boundary at position " +
                    std::to_string(i));
      }
      continued = false;
      out.push_back(tok);
      continue;
    }
    std::string_view piece = tok;
    continued = piece.size() > tokens::kContinuation.size() &&
                piece.substr(piece.size() - tokens::kContinuation.size()) == tokens::kContinuation;
    if (continued) piece.remove_suffix(tokens::kContinuation.size());
    for (auto& a : tokens::split_atoms(piece)) out.push_back(std::move(a));
  }
  if (continued && !options.lenient) throw Error("dangling continuation marker at end of stream");
  return out;
}

VocabReport vocab_report(const BpeModel& model, const std::vector<TokenStream>& corpus) {
  std::map<std::string, std::size_t> freq;
  for (const auto& s : corpus) {
    for (const auto& piece : apply(model, s)) {
      if (is_boundary(piece)) continue;
      std::string_view p = piece;
      if (p.size() > tokens::kContinuation.size() &&
          p.substr(p.size() - tokens::kContinuation.size()) == tokens::kContinuation) {
        p.remove_suffix(tokens::kContinuation.size());
      }
      ++freq[std::string(p)];
    }
  }
  VocabReport report;
  for (const auto& b : model.base_symbols()) {
    report.entries.push_back({b, freq.count(b) ? freq.at(b) : 0, false});
  }
  for (const auto& r : model.rules()) {
    report.entries.push_back({r.merged, freq.count(r.merged) ? freq.at(r.merged) : 0, true});
  }
  report.base_count = model.base_symbols().size();
  report.merged_count = model.rules().size();
  return report;
}

}  // namespace subchar::bpe
