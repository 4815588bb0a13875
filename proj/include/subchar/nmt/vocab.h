#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace subchar::nmt {

/// Symbol <-> id bijection. Ids 0..3 are reserved for padding, begin- and
/// end-of-sentence and the unknown symbol.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;

  Vocab();

  /// Symbols ordered by descending frequency, ties by byte order.
  static Vocab build(const std::vector<std::vector<std::string>>& sentences);
  static Vocab from_symbols(const std::vector<std::string>& symbols);  // includes reserved ids

  int add(const std::string& symbol);
  int id(const std::string& symbol) const;  // kUnk when absent
  bool contains(const std::string& symbol) const { return ids_.count(symbol) != 0; }
  const std::string& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::vector<int> encode(const std::vector<std::string>& sentence) const;
  /// Drops padding and sentence markers; stops at end-of-sentence.
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  uint64_t hash() const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace subchar::nmt
