#pragma once

#include <string>
#include <string_view>

// UTF-8 / UTF-32 plumbing. Document text is held as UTF-32 so that every
// offset is a Unicode scalar value index.
namespace das::unicode {

// Invalid sequences decode to U+FFFD.
std::u32string from_utf8(std::string_view bytes);
std::string to_utf8(std::u32string_view text);

std::u32string nfc(std::u32string_view text);

// Simple (1:1) case mappings, so lowered text keeps the same offsets.
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view text);

bool is_lower(char32_t c);
bool is_upper(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_word(char32_t c);  // letter, digit or underscore
bool is_space(char32_t c);

std::u32string_view trim(std::u32string_view text);

}  // namespace das::unicode
