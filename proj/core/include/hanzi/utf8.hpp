#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hanzi::utf8 {

/// Decodes a UTF-8 string. Throws Utf8Error on malformed, overlong or
/// surrogate sequences.
std::u32string decode(std::string_view text);

std::string encode(char32_t code_point);
std::string encode(std::u32string_view code_points);
void append(std::string& out, char32_t code_point);

/// Returns the code point if `text` holds exactly one, otherwise nullopt.
std::optional<char32_t> single_code_point(std::string_view text);

/// CJK Unified Ideographs (U+4E00..U+9FFF) and Extension A (U+3400..U+4DBF).
constexpr bool is_chinese_character(char32_t c) noexcept {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF);
}

}  // namespace hanzi::utf8
