#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Thin UTF-8 and character-property helpers over ICU.
namespace synfact::unicode {

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Invalid or truncated sequences yield U+FFFD and consume one byte.
char32_t decode(std::string_view text, std::size_t& pos) noexcept;

void append_utf8(std::string& out, char32_t cp);

bool is_letter(char32_t cp) noexcept;
bool is_number(char32_t cp) noexcept;
bool is_mark(char32_t cp) noexcept;
bool is_alnum(char32_t cp) noexcept;
bool is_whitespace(char32_t cp) noexcept;
bool is_upper(char32_t cp) noexcept;
bool is_lower(char32_t cp) noexcept;

/// Full (locale-independent) lowercase mapping.
std::string to_lower(std::string_view text);

/// Collapses every run of Unicode whitespace into one ASCII space and trims.
std::string normalize_space(std::string_view text);

}  // namespace synfact::unicode
