#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synfact::wiki {

/// Words that end in a period without ending a sentence ("Dr", "bzw", ...),
/// stored without the trailing period. Unknown languages get the English list.
std::span<const std::string_view> abbreviations(std::string_view language) noexcept;

/// Rule-based sentence segmentation.
///
/// Paragraphs (blank-line separated) are segmented independently, so no
/// sentence crosses a paragraph break. A terminal mark (. ! ? …) ends a
/// sentence when it is followed by whitespace and a character that is not a
/// lowercase letter, and, for a single period, when the preceding word is not
/// an abbreviation, a single-letter initial, a dotted form like "z.B", or (for
/// German) a 1-3 digit ordinal. Returned sentences are trimmed substrings of
/// the whitespace-normalized paragraph.
std::vector<std::string> split_sentences(std::string_view text, std::string_view language);

}  // namespace synfact::wiki
