#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subchar {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when input bytes are not valid UTF-8.
class EncodingError : public Error {
 public:
  EncodingError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Decodes one code point starting at `pos`, advancing `pos`. Throws EncodingError.
char32_t decode_code_point(std::string_view text, std::size_t& pos);
std::string encode_code_point(char32_t cp);
std::vector<char32_t> code_points(std::string_view text);
bool is_valid_utf8(std::string_view text);

/// True for marks that attach to the preceding code point (combining
/// diacritics, kana voicing marks, variation selectors, ZWJ).
bool is_extending(char32_t cp);

/// Splits UTF-8 text into graphemes: a base code point plus any extending
/// code points that follow it.
std::vector<std::string> split_graphemes(std::string_view text);
bool is_single_grapheme(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t value);

std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace subchar
