#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subchar/bpe.h"
#include "subchar/decomposition.h"
#include "subchar/units.h"

namespace subchar::pipeline {

/// Converts one corpus side between sentences and model tokens at a given
/// granularity, and back.
///
///   word       tokens as they are
///   char       one token per grapheme, "▁" between words
///   *-bpe      char / ideograph / stroke stream, then BPE pieces
class SideCodec {
 public:
  SideCodec(Granularity level, const DecompositionTable* table);

  Granularity level() const { return level_; }
  const DecompositionTable* table() const { return table_; }

  /// Tokens before BPE.
  std::vector<std::string> base(const std::string& sentence) const;
  /// Inverse of base(). In lenient mode undecodable tokens and spans become
  /// the unknown grapheme instead of throwing.
  std::string unbase(const std::vector<std::string>& tokens, bool lenient = false) const;

  void set_bpe(bpe::BpeModel model) { bpe_ = std::move(model); }
  const bpe::BpeModel* bpe() const { return bpe_ ? &*bpe_ : nullptr; }

  /// base() followed by BPE when the level uses it.
  std::vector<std::string> encode(const std::string& sentence) const;
  std::string decode(const std::vector<std::string>& tokens, bool lenient = false) const;

  /// Model output to sentence: the unknown-symbol token is replaced before
  /// lenient decoding, except at word level where it stays literal.
  std::string decode_output(const std::vector<std::string>& tokens) const;

 private:
  UnitStream parse(const std::vector<std::string>& tokens, bool lenient) const;

  Granularity level_;
  const DecompositionTable* table_;
  std::optional<bpe::BpeModel> bpe_;
};

inline constexpr const char* kUnknownGrapheme = "\xEF\xBF\xBD";  // U+FFFD

}  // namespace subchar::pipeline
