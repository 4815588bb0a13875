#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Token syntax shared by every stream file: unit tokens, word boundaries,
// end-of-character markers and BPE continuation markers.
namespace subchar::tokens {

inline constexpr std::string_view kWordBoundary = "▁";
inline constexpr std::string_view kContinuation = "@@";
inline constexpr char kEscape = '\\';

std::string eoc(uint32_t tag);
std::optional<uint32_t> parse_eoc(std::string_view token);

// Graphemes that must be escaped when they occur as literal text.
bool is_reserved(std::string_view grapheme);

// Splits a label into atoms. An atom is an end-of-character marker, an escaped
// grapheme ("\x") or a bare non-reserved grapheme. Throws Error on malformed input.
std::vector<std::string> split_atoms(std::string_view label);
bool is_atom(std::string_view token);

}  // namespace subchar::tokens
