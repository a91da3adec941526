#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synfact::metrics {

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string language;
};

/// Lowercases, splits on Unicode whitespace and trims each chunk: leading
/// characters that are not letters/digits and trailing characters that are not
/// letters/digits/combining marks are removed; chunks left without any letter
/// or digit are dropped. Inner hyphens and apostrophes stay, so
/// "Britisch-Niederländischen" is one token.
TokenSequence tokenize(std::string_view text, std::string_view language);

/// tokenize(text, language).tokens.size()
int count_words(std::string_view text, std::string_view language = "en");

}  // namespace synfact::metrics
