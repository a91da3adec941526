#include "synfact/wikisource/sentences.hpp"

#include <algorithm>

#include "synfact/common/unicode.hpp"

namespace synfact::wiki {

namespace {

constexpr std::string_view kEnglish[] = {
    "Mr",   "Mrs",  "Ms",    "Dr",   "Prof", "Sr",   "Jr",   "St",    "Mt",  "Ft",
    "vs",   "Gen",  "Col",   "Lt",   "Sgt",  "Capt", "Rev",  "Hon",   "Gov", "Sen",
    "Rep",  "Inc",  "Ltd",   "Co",   "Corp", "Bros", "No",   "Nos",   "Fig", "approx",
    "ca",   "cf",   "Jan",  "Feb",  "Aug",  "Sept", "Oct",   "Nov", "Dec"};

constexpr std::string_view kGerman[] = {
    "bzw",  "Dr",   "Prof", "Nr",   "usw",  "ca",   "vgl",  "sog",   "ggf",  "evtl",
    "Hl",   "St",   "Jh",   "Jhd",  "Chr",  "geb",  "gest", "Mio",   "Mrd",  "Str",
    "Sr",   "Hr",   "Fr",   "inkl", "exkl", "bspw", "zzgl", "abzgl", "Abb",  "Bd",
    "Kap",  "Aufl", "Hrsg", "gegr", "verh", "Tel",  "Verf", "lat"};

constexpr std::string_view kSpanish[] = {
    "Sr",   "Sra",  "Srta", "Dr",   "Dra",  "Lic",  "Ud",   "Uds",   "Sto",  "Sta",
    "Mons", "Gral", "Cnel", "Tte",  "Cap",  "núm",  "Núm",  "pág",   "págs", "aprox",
    "ej",   "vol",  "cap",  "art",  "Avda", "Av",   "Cía",   "dcha", "izq",
    "ss",   "op",   "cit",  "Excmo", "Ilmo", "Fdo"};

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'…'; }

bool is_closer(char32_t cp) {
  switch (cp) {
    case U'"': case U'\'': case U')': case U']': case U'»': case U'«':
    case U'”': case U'“': case U'’':
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t cp) {
  switch (cp) {
    case U'"': case U'\'': case U'(': case U'[': case U'»': case U'«':
    case U'„': case U'“': case U'‘': case U'¿': case U'¡':
      return true;
    default:
      return false;
  }
}

// The word immediately before `end` (exclusive), without leading openers.
std::string_view word_before(std::string_view para, std::size_t end) {
  std::size_t start = para.rfind(' ', end == 0 ? 0 : end - 1);
  start = start == std::string_view::npos ? 0 : start + 1;
  std::string_view word = para.substr(start, end - start);
  while (!word.empty()) {
    std::size_t pos = 0;
    const char32_t cp = unicode::decode(word, pos);
    if (!is_opener(cp)) break;
    word.remove_prefix(pos);
  }
  return word;
}

std::size_t code_points(std::string_view s) {
  std::size_t n = 0, pos = 0;
  while (pos < s.size()) {
    unicode::decode(s, pos);
    ++n;
  }
  return n;
}

bool is_abbreviation(std::string_view word, std::string_view language) {
  if (word.empty()) return false;
  if (word.find('.') != std::string_view::npos) return true;  // e.g, U.S, z.B
  std::size_t pos = 0;
  const char32_t first = unicode::decode(word, pos);
  if (pos == word.size() && unicode::is_letter(first)) return true;  // initials
  const auto list = abbreviations(language);
  if (std::find(list.begin(), list.end(), word) != list.end()) return true;
  if (language == "de" && code_points(word) <= 3 &&
      std::all_of(word.begin(), word.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return true;  // "3. Oktober", "2. Weltkrieg"
  }
  return false;
}

void split_paragraph(std::string_view para, std::string_view language, std::vector<std::string>& out) {
  std::size_t sentence_start = 0;
  std::size_t pos = 0;
  while (pos < para.size()) {
    const std::size_t mark_start = pos;
    const char32_t cp = unicode::decode(para, pos);
    if (!is_terminal(cp)) continue;

    std::size_t run = 1;
    std::size_t end = pos;
    while (end < para.size()) {
      std::size_t probe = end;
      const char32_t next = unicode::decode(para, probe);
      if (!is_terminal(next)) break;
      end = probe;
      ++run;
    }
    while (end < para.size()) {
      std::size_t probe = end;
      if (!is_closer(unicode::decode(para, probe))) break;
      end = probe;
    }
    pos = end;
    if (end < para.size() && para[end] != ' ') continue;  // "3.5", "a.m"

    if (end < para.size()) {
      std::size_t probe = end + 1;
      if (probe < para.size() && unicode::is_lower(unicode::decode(para, probe))) continue;
    }
    if (cp == U'.' && run == 1 && is_abbreviation(word_before(para, mark_start), language)) continue;

    out.emplace_back(para.substr(sentence_start, end - sentence_start));
    sentence_start = end < para.size() ? end + 1 : end;
  }
  if (sentence_start < para.size()) out.emplace_back(para.substr(sentence_start));
}

}  // namespace

std::span<const std::string_view> abbreviations(std::string_view language) noexcept {
  if (language == "de") return kGerman;
  if (language == "es") return kSpanish;
  return kEnglish;
}

std::vector<std::string> split_sentences(std::string_view text, std::string_view language) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  while (start < text.size()) {
    // A paragraph ends at a line that holds only whitespace.
    std::size_t end = start;
    std::size_t cursor = start;
    for (;;) {
      const auto nl = text.find('\n', cursor);
      if (nl == std::string_view::npos) {
        end = text.size();
        cursor = text.size();
        break;
      }
      auto next = nl + 1;
      while (next < text.size() && (text[next] == ' ' || text[next] == '\t' || text[next] == '\r')) ++next;
      if (next < text.size() && text[next] == '\n') {
        end = nl;
        cursor = next + 1;
        break;
      }
      if (next >= text.size()) {
        end = text.size();
        cursor = text.size();
        break;
      }
      cursor = nl + 1;
    }
    const auto para = unicode::normalize_space(text.substr(start, end - start));
    if (!para.empty()) split_paragraph(para, language, sentences);
    start = cursor;
  }
  return sentences;
}

}  // namespace synfact::wiki
