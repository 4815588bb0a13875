#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subchar/text.h"
#include "subchar/units.h"

namespace subchar {

/// A malformed decomposition table. `line()` is 1-based.
class TableError : public Error {
 public:
  TableError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A unit stream that cannot be turned back into characters. `position()` is
/// the index of the offending unit.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t position)
      : Error(what + " at stream position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct CharEntry {
  std::string character;
  std::vector<std::string> ideographs;
  std::vector<std::string> strokes;
  uint32_t ideo_tag = 0;
  uint32_t stroke_tag = 0;

  const std::vector<std::string>& units(DecompLevel level) const {
    return level == DecompLevel::Ideograph ? ideographs : strokes;
  }
  uint32_t tag(DecompLevel level) const {
    return level == DecompLevel::Ideograph ? ideo_tag : stroke_tag;
  }
};

/// Character decomposition table with derived disambiguation tags.
///
/// Every character maps to a flat ideograph sequence and a flat stroke
/// sequence. Characters sharing a sequence are told apart by a tag, assigned
/// 0, 1, ... in code-point order of the characters, so each (sequence, tag)
/// pair identifies exactly one character. Immutable after load.
class DecompositionTable {
 public:
  /// Parses the tab-separated table format:
  ///   character<TAB>ideograph symbols<TAB>stroke symbols
  /// Blank lines and lines starting with '#' are skipped. Ideographic
  /// description operators in the symbol fields are dropped.
  static DecompositionTable parse(std::string_view text);
  static DecompositionTable load(std::istream& in);
  static DecompositionTable load_file(const std::string& path);

  const CharEntry* find(std::string_view character) const;
  std::optional<std::string> lookup(DecompLevel level, const std::vector<std::string>& units,
                                    uint32_t tag) const;

  const SymbolSet& inventory(DecompLevel level) const {
    return level == DecompLevel::Ideograph ? ideo_inventory_ : stroke_inventory_;
  }
  /// Entries in code-point order of their characters.
  const std::vector<CharEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  using ReverseKey = std::pair<std::vector<std::string>, uint32_t>;

  std::vector<CharEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<ReverseKey, std::size_t> reverse_ideo_;
  std::map<ReverseKey, std::size_t> reverse_stroke_;
  SymbolSet ideo_inventory_;
  SymbolSet stroke_inventory_;
};

/// Units of one grapheme: its sequence plus an end-of-character marker, or a
/// single passthrough unit when the grapheme is not in the table.
UnitStream decompose_char(const DecompositionTable& table, std::string_view grapheme,
                          DecompLevel level);

/// Encodes pre-tokenized words, separating words with boundary units. Empty
/// words are skipped.
UnitStream encode_text(const DecompositionTable& table, const std::vector<std::string>& words,
                       DecompLevel level);

struct DecodeOptions {
  // Replace undecodable spans with `unknown` instead of throwing.
  bool lenient = false;
  std::string unknown = "�";
};

std::vector<std::string> decode_text(const DecompositionTable& table, const UnitStream& stream,
                                     DecompLevel level, const DecodeOptions& options = {});

struct CoverageReport {
  std::size_t sentences = 0;
  std::size_t graphemes = 0;           // tokens, counted per grapheme
  std::size_t passthrough = 0;         // graphemes not in the table
  std::size_t distinct_characters = 0; // distinct graphemes, covered or not
  std::size_t distinct_covered = 0;    // distinct graphemes found in the table
  std::size_t distinct_ideographs = 0;
  std::size_t distinct_strokes = 0;
  std::map<std::string, std::size_t> ideograph_histogram;
  std::map<std::string, std::size_t> stroke_histogram;

  double passthrough_rate() const {
    return graphemes == 0 ? 0.0 : static_cast<double>(passthrough) / static_cast<double>(graphemes);
  }
};

CoverageReport coverage_stats(const DecompositionTable& table,
                              const std::vector<std::vector<std::string>>& corpus);

}  // namespace subchar
