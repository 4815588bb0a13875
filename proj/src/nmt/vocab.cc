#include "subchar/nmt/vocab.h"

#include <algorithm>
#include <map>

#include "subchar/text.h"

namespace subchar::nmt {

Vocab::Vocab() {
  for (const char* s : {"<pad>", "<s>", "</s>", "<unk>"}) add(s);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& sentences) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& tok : s) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (const auto& [sym, _] : ordered) v.add(sym);
  return v;
}

Vocab Vocab::from_symbols(const std::vector<std::string>& symbols) {
  Vocab v;
  if (symbols.size() < kReserved) throw Error("vocabulary is missing reserved symbols");
  for (int i = 0; i < kReserved; ++i) {
    if (symbols[static_cast<std::size_t>(i)] != v.symbols_[static_cast<std::size_t>(i)]) {
      throw Error("vocabulary reserved symbol mismatch at id " + std::to_string(i));
    }
  }
  for (std::size_t i = kReserved; i < symbols.size(); ++i) {
    if (v.contains(symbols[i])) throw Error("duplicate vocabulary symbol '" + symbols[i] + "'");
    v.add(symbols[i]);
  }
  return v;
}

int Vocab::add(const std::string& symbol) {
  auto [it, fresh] = ids_.emplace(symbol, static_cast<int>(symbols_.size()));
  if (fresh) symbols_.push_back(symbol);
  return it->second;
}

int Vocab::id(const std::string& symbol) const {
  const auto it = ids_.find(symbol);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::encode(const std::vector<std::string>& sentence) const {
  std::vector<int> out;
  out.reserve(sentence.size());
  for (const auto& s : sentence) out.push_back(id(s));
  return out;
}

std::vector<std::string> Vocab::decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id == kEos) break;
    if (id == kPad || id == kBos) continue;
    out.push_back(symbol(id));
  }
  return out;
}

uint64_t Vocab::hash() const { return fnv1a64(join(symbols_, "\n")); }

}  // namespace subchar::nmt
