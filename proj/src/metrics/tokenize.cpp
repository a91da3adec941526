#include "synfact/metrics/tokenize.hpp"

#include "synfact/common/unicode.hpp"

namespace synfact::metrics {

namespace {

// Trims one whitespace-free chunk and appends it if it still holds a word.
void emit(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  while (begin < chunk.size()) {
    std::size_t next = begin;
    if (unicode::is_alnum(unicode::decode(chunk, next))) break;
    begin = next;
  }
  if (begin == chunk.size()) return;

  // Walk forward remembering the end of the last letter/digit/mark.
  std::size_t end = begin;
  std::size_t pos = begin;
  while (pos < chunk.size()) {
    const char32_t cp = unicode::decode(chunk, pos);
    if (unicode::is_alnum(cp) || unicode::is_mark(cp)) end = pos;
  }
  out.push_back(unicode::to_lower(chunk.substr(begin, end - begin)));
}

}  // namespace

TokenSequence tokenize(std::string_view text, std::string_view language) {
  TokenSequence seq;
  seq.language = std::string(language);
  std::size_t chunk_start = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t here = pos;
    const char32_t cp = unicode::decode(text, pos);
    if (unicode::is_whitespace(cp)) {
      if (here > chunk_start) emit(text.substr(chunk_start, here - chunk_start), seq.tokens);
      chunk_start = pos;
    }
  }
  if (chunk_start < text.size()) emit(text.substr(chunk_start), seq.tokens);
  return seq;
}

int count_words(std::string_view text, std::string_view language) {
  return static_cast<int>(tokenize(text, language).tokens.size());
}

}  // namespace synfact::metrics
