#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "synfact/wikisource/types.hpp"

namespace synfact::wiki {

inline constexpr std::size_t kPageSampleSize = 5;
inline constexpr std::size_t kMinSentenceTokens = 3;
inline constexpr double kMaxNonLetterRatio = 0.8;

/// A sentence can serve as evidence when it has at least three word tokens and
/// no more than 80% of its non-space characters are non-letters.
bool is_eligible_sentence(std::string_view sentence, std::string_view language);

/// Strips, segments and filters one page. Summary sentences are the eligible
/// sentences of the text before the first heading.
ParsedPage parse_page(const RawPage& page);

/// Draws the two evidence groups of a page.
///
/// PageRandom5 holds up to five distinct body sentences drawn without
/// replacement (all of them on short pages), in page order. SummaryTriple3
/// holds the first, one random interior and the last summary sentence,
/// deduplicated in order; it is omitted when the summary is empty. The draw is
/// a pure function of the page content and `seed`.
std::vector<KnowledgeSource> sample_knowledge_sources(const ParsedPage& page, std::uint64_t seed);

}  // namespace synfact::wiki
