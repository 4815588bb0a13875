#include "subchar/pipeline/granularity.h"

#include "subchar/text.h"
#include "subchar/tokens.h"

namespace subchar::pipeline {

SideCodec::SideCodec(Granularity level, const DecompositionTable* table) : level_(level), table_(table) {
  if (uses_table(level) && table == nullptr) {
    throw Error("granularity " + to_string(level) + " needs a decomposition table");
  }
}

std::vector<std::string> SideCodec::base(const std::string& sentence) const {
  const auto words = split_whitespace(sentence);
  switch (level_) {
    case Granularity::Word:
      return words;
    case Granularity::Char:
    case Granularity::CharBpe:
      return format_stream(char_stream(words));
    case Granularity::IdeographBpe:
    case Granularity::StrokeBpe: {
      const DecompLevel dl = decomp_level(level_);
      return format_stream(encode_text(*table_, words, dl), &table_->inventory(dl));
    }
  }
  return {};
}

UnitStream SideCodec::parse(const std::vector<std::string>& tokens, bool lenient) const {
  const bool decomposed = uses_table(level_);
  const DecompLevel dl = decomposed ? decomp_level(level_) : DecompLevel::Ideograph;
  const SymbolSet* inv = decomposed ? &table_->inventory(dl) : nullptr;
  UnitStream out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    try {
      Unit u = parse_unit_token(t, dl, inv);
      // Markers mean nothing in a character stream.
      if (!decomposed && u.kind() == UnitKind::EocMarker) {
        if (!lenient) throw Error("end-of-character marker in a character-level stream");
        u = Unit::passthrough(kUnknownGrapheme);
      }
      out.push_back(std::move(u));
    } catch (const Error&) {
      if (!lenient) throw;
      out.push_back(Unit::passthrough(kUnknownGrapheme));
    }
  }
  return out;
}

std::string SideCodec::unbase(const std::vector<std::string>& tokens, bool lenient) const {
  if (level_ == Granularity::Word) return join(tokens, " ");
  const UnitStream stream = parse(tokens, lenient);
  if (!uses_table(level_)) return join(words_of(stream), " ");
  DecodeOptions opts;
  opts.lenient = lenient;
  opts.unknown = kUnknownGrapheme;
  return join(decode_text(*table_, stream, decomp_level(level_), opts), " ");
}

std::vector<std::string> SideCodec::encode(const std::string& sentence) const {
  auto toks = base(sentence);
  if (!uses_bpe(level_)) return toks;
  if (!bpe_) throw Error("granularity " + to_string(level_) + " needs a trained BPE model");
  return bpe::apply(*bpe_, toks);
}

std::string SideCodec::decode(const std::vector<std::string>& tokens, bool lenient) const {
  if (!uses_bpe(level_)) return unbase(tokens, lenient);
  bpe::DesegmentOptions opts;
  opts.lenient = lenient;
  if (!lenient) return unbase(bpe::desegment(tokens, opts), false);
  // Pieces that do not lex become one unknown atom, keeping their continuation marker.
  std::vector<std::string> cleaned;
  cleaned.reserve(tokens.size());
  const std::string cont(tokens::kContinuation);
  for (const auto& t : tokens) {
    const bool continued = t.size() > cont.size() && t.ends_with(cont);
    const std::string core = continued ? t.substr(0, t.size() - cont.size()) : t;
    if (core == tokens::kWordBoundary) {
      cleaned.push_back(t);
      continue;
    }
    bool ok = !core.empty();
    if (ok) {
      try {
        tokens::split_atoms(core);
      } catch (const Error&) {
        ok = false;
      }
    }
    cleaned.push_back(ok ? t : std::string(kUnknownGrapheme) + (continued ? cont : ""));
  }
  return unbase(bpe::desegment(cleaned, opts), true);
}

std::string SideCodec::decode_output(const std::vector<std::string>& tokens) const {
  if (level_ == Granularity::Word) return join(tokens, " ");
  std::vector<std::string> mapped;
  mapped.reserve(tokens.size());
  for (const auto& t : tokens) mapped.push_back(t == "<unk>" ? std::string(kUnknownGrapheme) : t);
  return decode(mapped, true);
}

}  // namespace subchar::pipeline
