#include "subchar/tokens.h"

#include "subchar/text.h"

namespace subchar::tokens {

std::string eoc(uint32_t tag) { return "</c" + std::to_string(tag) + ">"; }

namespace {

// Length of an end-of-character marker at the start of `s`, or 0.
std::size_t eoc_length(std::string_view s) {
  if (s.size() < 5 || s.substr(0, 3) != "</c") return 0;
  std::size_t i = 3;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == 3 || i >= s.size() || s[i] != '>') return 0;
  if (i - 3 > 9) return 0;
  if (s[3] == '0' && i - 3 > 1) return 0;
  return i + 1;
}

}  // namespace

std::optional<uint32_t> parse_eoc(std::string_view token) {
  const std::size_t n = eoc_length(token);
  if (n == 0 || n != token.size()) return std::nullopt;
  return static_cast<uint32_t>(std::stoul(std::string(token.substr(3, n - 4))));
}

bool is_reserved(std::string_view grapheme) {
  if (grapheme.empty()) return false;
  const char c = grapheme.front();
  return c == kEscape || c == '<' || c == '@' || grapheme.substr(0, kWordBoundary.size()) == kWordBoundary;
}

std::vector<std::string> split_atoms(std::string_view label) {
  std::vector<std::string> atoms;
  std::size_t pos = 0;
  while (pos < label.size()) {
    const std::string_view rest = label.substr(pos);
    if (const std::size_t n = eoc_length(rest)) {
      atoms.emplace_back(rest.substr(0, n));
      pos += n;
      continue;
    }
    const bool escaped = rest.front() == kEscape;
    std::size_t p = pos + (escaped ? 1 : 0);
    if (p >= label.size()) throw Error("dangling escape in label '" + std::string(label) + "'");
    const std::size_t start = p;
    decode_code_point(label, p);
    while (p < label.size()) {
      std::size_t q = p;
      if (!is_extending(decode_code_point(label, q))) break;
      p = q;
    }
    const std::string_view grapheme = label.substr(start, p - start);
    if (!escaped && is_reserved(grapheme)) {
      throw Error("unescaped reserved character in label '" + std::string(label) + "'");
    }
    atoms.emplace_back(label.substr(pos, p - pos));
    pos = p;
  }
  return atoms;
}

bool is_atom(std::string_view token) {
  try {
    return split_atoms(token).size() == 1;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace subchar::tokens
