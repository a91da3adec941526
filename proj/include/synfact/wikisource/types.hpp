#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace synfact::wiki {

/// One article-namespace page as read from a dump.
struct RawPage {
  std::uint64_t page_id = 0;
  std::string title;  // used as the claim topic
  int ns = 0;
  std::string wikitext;
  std::string language;  // ISO 639-1
};

/// Eligible sentences of a page. Summary sentences come from the text before
/// the first section heading.
struct ParsedPage {
  std::uint64_t page_id = 0;
  std::string title;
  std::string language;
  std::vector<std::string> body_sentences;
  std::vector<std::string> summary_sentences;
};

enum class SourceKind { PageRandom5, SummaryTriple3 };

std::string_view to_string(SourceKind k) noexcept;
SourceKind parse_source_kind(std::string_view text);

struct KnowledgeSource {
  std::string source_id;
  std::uint64_t page_id = 0;
  std::string topic;
  std::string language;
  SourceKind kind = SourceKind::PageRandom5;
  std::vector<std::string> sentences;
  std::uint64_t seed = 0;  // run seed the sample was drawn under

  /// The evidence block given to the generator: sentences joined by one space.
  std::string evidence() const;

  bool operator==(const KnowledgeSource&) const = default;
};

void to_json(nlohmann::json& j, const KnowledgeSource& s);
void from_json(const nlohmann::json& j, KnowledgeSource& s);

}  // namespace synfact::wiki
