#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace subchar {

enum class UnitKind { Ideograph, Stroke, EocMarker, Passthrough, WordBoundary };

/// Which decomposition a stream is expressed in.
enum class DecompLevel { Ideograph, Stroke };

/// The five data granularities a pipeline side can use.
enum class Granularity { Word, Char, CharBpe, IdeographBpe, StrokeBpe };

std::string to_string(DecompLevel level);
std::string to_string(Granularity g);
Granularity parse_granularity(std::string_view name);
DecompLevel parse_level(std::string_view name);
bool uses_bpe(Granularity g);
bool uses_table(Granularity g);
DecompLevel decomp_level(Granularity g);  // only for IdeographBpe / StrokeBpe

/// One element of a unit stream. Only end-of-character markers carry a tag;
/// word boundaries carry nothing.
class Unit {
 public:
  static Unit ideograph(std::string symbol);
  static Unit stroke(std::string symbol);
  static Unit component(DecompLevel level, std::string symbol);
  static Unit eoc(uint32_t tag);
  static Unit passthrough(std::string grapheme);
  static Unit word_boundary();

  UnitKind kind() const { return kind_; }
  const std::string& symbol() const { return symbol_; }
  uint32_t tag() const { return tag_; }

  friend bool operator==(const Unit&, const Unit&) = default;

 private:
  Unit(UnitKind kind, std::string symbol, uint32_t tag)
      : kind_(kind), symbol_(std::move(symbol)), tag_(tag) {}

  UnitKind kind_;
  std::string symbol_;
  uint32_t tag_ = 0;
};

using UnitStream = std::vector<Unit>;
using SymbolSet = std::unordered_set<std::string>;

// Stream serialization. Passthrough graphemes are written verbatim unless they
// are reserved token characters or collide with a symbol in `inventory`, in
// which case they get a backslash prefix.
std::string unit_token(const Unit& unit, const SymbolSet* inventory = nullptr);
std::vector<std::string> format_stream(const UnitStream& stream, const SymbolSet* inventory = nullptr);
std::string format_stream_line(const UnitStream& stream, const SymbolSet* inventory = nullptr);

// Inverse of format_stream. Bare tokens found in `inventory` become component
// units of `level`; everything else becomes a passthrough.
Unit parse_unit_token(std::string_view token, DecompLevel level, const SymbolSet* inventory = nullptr);
UnitStream parse_stream(const std::vector<std::string>& tokens, DecompLevel level,
                        const SymbolSet* inventory = nullptr);

// Character-level streams: every grapheme is a passthrough unit, words are
// separated by boundaries.
UnitStream char_stream(const std::vector<std::string>& words);
std::vector<std::string> words_of(const UnitStream& char_level_stream);

}  // namespace subchar
