#include "subchar/units.h"

#include "subchar/text.h"
#include "subchar/tokens.h"

namespace subchar {

std::string to_string(DecompLevel level) {
  return level == DecompLevel::Ideograph ? "ideograph" : "stroke";
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::Word: return "word";
    case Granularity::Char: return "char";
    case Granularity::CharBpe: return "bpe";
    case Granularity::IdeographBpe: return "ideograph";
    case Granularity::StrokeBpe: return "stroke";
  }
  return "?";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "word") return Granularity::Word;
  if (name == "char") return Granularity::Char;
  if (name == "bpe" || name == "char-bpe") return Granularity::CharBpe;
  if (name == "ideograph" || name == "ideograph-bpe") return Granularity::IdeographBpe;
  if (name == "stroke" || name == "stroke-bpe") return Granularity::StrokeBpe;
  throw Error("unknown granularity '" + std::string(name) + "'");
}

DecompLevel parse_level(std::string_view name) {
  if (name == "ideograph") return DecompLevel::Ideograph;
  if (name == "stroke") return DecompLevel::Stroke;
  throw Error("unknown decomposition level '" + std::string(name) + "'");
}

bool uses_bpe(Granularity g) {
  return g == Granularity::CharBpe || g == Granularity::IdeographBpe || g == Granularity::StrokeBpe;
}

bool uses_table(Granularity g) {
  return g == Granularity::IdeographBpe || g == Granularity::StrokeBpe;
}

DecompLevel decomp_level(Granularity g) {
  if (g == Granularity::IdeographBpe) return DecompLevel::Ideograph;
  if (g == Granularity::StrokeBpe) return DecompLevel::Stroke;
  throw Error("granularity '" + to_string(g) + "' has no decomposition level");
}

Unit Unit::ideograph(std::string symbol) { return Unit(UnitKind::Ideograph, std::move(symbol), 0); }
Unit Unit::stroke(std::string symbol) { return Unit(UnitKind::Stroke, std::move(symbol), 0); }
Unit Unit::component(DecompLevel level, std::string symbol) {
  return level == DecompLevel::Ideograph ? ideograph(std::move(symbol)) : stroke(std::move(symbol));
}
Unit Unit::eoc(uint32_t tag) { return Unit(UnitKind::EocMarker, {}, tag); }
Unit Unit::passthrough(std::string grapheme) {
  return Unit(UnitKind::Passthrough, std::move(grapheme), 0);
}
Unit Unit::word_boundary() { return Unit(UnitKind::WordBoundary, {}, 0); }

std::string unit_token(const Unit& unit, const SymbolSet* inventory) {
  switch (unit.kind()) {
    case UnitKind::Ideograph:
    case UnitKind::Stroke:
      return unit.symbol();
    case UnitKind::EocMarker:
      return tokens::eoc(unit.tag());
    case UnitKind::WordBoundary:
      return std::string(tokens::kWordBoundary);
    case UnitKind::Passthrough:
      if (tokens::is_reserved(unit.symbol()) ||
          (inventory != nullptr && inventory->count(unit.symbol()) != 0)) {
        return tokens::kEscape + unit.symbol();
      }
      return unit.symbol();
  }
  return {};
}

std::vector<std::string> format_stream(const UnitStream& stream, const SymbolSet* inventory) {
  std::vector<std::string> out;
  out.reserve(stream.size());
  for (const auto& u : stream) out.push_back(unit_token(u, inventory));
  return out;
}

std::string format_stream_line(const UnitStream& stream, const SymbolSet* inventory) {
  return join(format_stream(stream, inventory), " ");
}

Unit parse_unit_token(std::string_view token, DecompLevel level, const SymbolSet* inventory) {
  if (token == tokens::kWordBoundary) return Unit::word_boundary();
  if (auto tag = tokens::parse_eoc(token)) return Unit::eoc(*tag);
  if (!token.empty() && token.front() == tokens::kEscape) {
    const std::string_view rest = token.substr(1);
    if (!is_single_grapheme(rest)) throw Error("malformed escaped token '" + std::string(token) + "'");
    return Unit::passthrough(std::string(rest));
  }
  if (!is_single_grapheme(token) || tokens::is_reserved(token)) {
    throw Error("malformed unit token '" + std::string(token) + "'");
  }
  if (inventory != nullptr && inventory->count(std::string(token)) != 0) {
    return Unit::component(level, std::string(token));
  }
  return Unit::passthrough(std::string(token));
}

UnitStream parse_stream(const std::vector<std::string>& toks, DecompLevel level,
                        const SymbolSet* inventory) {
  UnitStream out;
  out.reserve(toks.size());
  for (const auto& t : toks) out.push_back(parse_unit_token(t, level, inventory));
  return out;
}

UnitStream char_stream(const std::vector<std::string>& words) {
  UnitStream out;
  bool first = true;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!first) out.push_back(Unit::word_boundary());
    first = false;
    for (auto& g : split_graphemes(w)) out.push_back(Unit::passthrough(std::move(g)));
  }
  return out;
}

std::vector<std::string> words_of(const UnitStream& stream) {
  std::vector<std::string> words;
  std::string current;
  for (const auto& u : stream) {
    if (u.kind() == UnitKind::WordBoundary) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else if (u.kind() == UnitKind::EocMarker) {
      throw Error("end-of-character marker in a character-level stream");
    } else {
      current += u.symbol();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace subchar
