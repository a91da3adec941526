#include "synfact/common/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

namespace synfact::unicode {

char32_t decode(std::string_view text, std::size_t& pos) noexcept {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  const unsigned char b0 = s[pos];
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xfffd;
  }
  if (pos + static_cast<std::size_t>(len) > n) {
    ++pos;
    return 0xfffd;
  }
  for (int i = 1; i < len; ++i) {
    const unsigned char b = s[pos + static_cast<std::size_t>(i)];
    if ((b & 0xc0) != 0x80) {
      ++pos;
      return 0xfffd;
    }
    cp = (cp << 6) | (b & 0x3f);
  }
  // Overlong forms and surrogates are invalid.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
    ++pos;
    return 0xfffd;
  }
  pos += static_cast<std::size_t>(len);
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

namespace {
std::uint32_t category_mask(char32_t cp) noexcept { return U_GET_GC_MASK(static_cast<UChar32>(cp)); }
}  // namespace

bool is_letter(char32_t cp) noexcept { return (category_mask(cp) & U_GC_L_MASK) != 0; }
bool is_number(char32_t cp) noexcept { return (category_mask(cp) & U_GC_N_MASK) != 0; }
bool is_mark(char32_t cp) noexcept { return (category_mask(cp) & U_GC_M_MASK) != 0; }
bool is_alnum(char32_t cp) noexcept { return (category_mask(cp) & (U_GC_L_MASK | U_GC_N_MASK)) != 0; }
bool is_whitespace(char32_t cp) noexcept { return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0; }
bool is_upper(char32_t cp) noexcept { return u_isUUppercase(static_cast<UChar32>(cp)) != 0; }
bool is_lower(char32_t cp) noexcept { return u_isULowercase(static_cast<UChar32>(cp)) != 0; }

std::string to_lower(std::string_view text) {
  auto us = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  us.toLower(icu::Locale::getRoot());
  std::string out;
  us.toUTF8String(out);
  return out;
}

std::string normalize_space(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = decode(text, pos);
    if (is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(text.substr(start, pos - start));
  }
  return out;
}

}  // namespace synfact::unicode
