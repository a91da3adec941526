#include "synfact/wikisource/knowledge.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "synfact/common/errors.hpp"
#include "synfact/common/rng.hpp"
#include "synfact/common/unicode.hpp"
#include "synfact/metrics/tokenize.hpp"
#include "synfact/wikisource/markup.hpp"
#include "synfact/wikisource/sentences.hpp"

namespace synfact::wiki {

using nlohmann::json;

std::string_view to_string(SourceKind k) noexcept {
  return k == SourceKind::PageRandom5 ? "page_random5" : "summary_triple3";
}

SourceKind parse_source_kind(std::string_view text) {
  if (text == "page_random5") return SourceKind::PageRandom5;
  if (text == "summary_triple3") return SourceKind::SummaryTriple3;
  throw ConfigError("unknown knowledge source kind '" + std::string(text) + "'");
}

std::string KnowledgeSource::evidence() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

void to_json(json& j, const KnowledgeSource& s) {
  j = json{{"source_id", s.source_id}, {"page_id", s.page_id},       {"topic", s.topic}, {"language", s.language},
           {"kind", to_string(s.kind)},   {"sentences", s.sentences}, {"seed", s.seed}};
}

void from_json(const json& j, KnowledgeSource& s) {
  s.source_id = j.at("source_id").get<std::string>();
  s.page_id = j.at("page_id").get<std::uint64_t>();
  s.topic = j.at("topic").get<std::string>();
  s.language = j.at("language").get<std::string>();
  s.kind = parse_source_kind(j.at("kind").get<std::string>());
  s.sentences = j.at("sentences").get<std::vector<std::string>>();
  s.seed = j.at("seed").get<std::uint64_t>();
}

bool is_eligible_sentence(std::string_view sentence, std::string_view language) {
  if (metrics::tokenize(sentence, language).tokens.size() < kMinSentenceTokens) return false;
  std::size_t letters = 0, visible = 0, pos = 0;
  while (pos < sentence.size()) {
    const char32_t cp = unicode::decode(sentence, pos);
    if (unicode::is_whitespace(cp)) continue;
    ++visible;
    if (unicode::is_letter(cp)) ++letters;
  }
  return visible > 0 && static_cast<double>(visible - letters) <= kMaxNonLetterRatio * static_cast<double>(visible);
}

namespace {

std::vector<std::string> eligible(std::vector<std::string> sentences, std::string_view language) {
  std::erase_if(sentences, [&](const std::string& s) { return !is_eligible_sentence(s, language); });
  return sentences;
}

std::vector<std::string> distinct_in_order(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& s : items) {
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

std::uint64_t page_seed(const ParsedPage& page, std::uint64_t seed) {
  std::string key = page.language + '\n' + std::to_string(page.page_id) + '\n' + page.title;
  for (const auto& s : page.body_sentences) (key += '\n') += s;
  key += "\n\x1f";
  for (const auto& s : page.summary_sentences) (key += '\n') += s;
  return derive_seed(seed, key);
}

std::string source_id(const ParsedPage& page, SourceKind kind) {
  return page.language + "-" + std::to_string(page.page_id) + "-" +
         (kind == SourceKind::PageRandom5 ? "p5" : "s3");
}

}  // namespace

ParsedPage parse_page(const RawPage& page) {
  const auto article = strip_article(page.wikitext);
  ParsedPage parsed;
  parsed.page_id = page.page_id;
  parsed.title = page.title;
  parsed.language = page.language;
  parsed.body_sentences = eligible(split_sentences(article.text(), page.language), page.language);
  parsed.summary_sentences = eligible(split_sentences(article.summary_text(), page.language), page.language);
  return parsed;
}

std::vector<KnowledgeSource> sample_knowledge_sources(const ParsedPage& page, std::uint64_t seed) {
  std::vector<KnowledgeSource> out;
  const auto body = distinct_in_order(page.body_sentences);
  const auto summary = distinct_in_order(page.summary_sentences);
  if (body.empty() && summary.empty()) return out;

  Rng rng(page_seed(page, seed));
  auto make = [&](SourceKind kind) {
    KnowledgeSource src;
    src.source_id = source_id(page, kind);
    src.page_id = page.page_id;
    src.topic = page.title;
    src.language = page.language;
    src.kind = kind;
    src.seed = seed;
    return src;
  };

  if (!body.empty()) {
    auto src = make(SourceKind::PageRandom5);
    for (auto idx : rng.sample_indices(body.size(), kPageSampleSize)) src.sentences.push_back(body[idx]);
    out.push_back(std::move(src));
  }
  if (!summary.empty()) {
    auto src = make(SourceKind::SummaryTriple3);
    std::vector<std::size_t> picks{0};
    if (summary.size() >= 3) picks.push_back(static_cast<std::size_t>(rng.between(1, summary.size() - 2)));
    picks.push_back(summary.size() - 1);
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (auto idx : picks) src.sentences.push_back(summary[idx]);
    out.push_back(std::move(src));
  }
  return out;
}

}  // namespace synfact::wiki
