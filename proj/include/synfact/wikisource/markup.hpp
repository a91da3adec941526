#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synfact::wiki {

/// Plain text of an article, split into paragraphs.
///
/// Section headings never appear in the text; they only end paragraphs. The
/// summary is every paragraph before the first heading.
struct StrippedArticle {
  std::vector<std::string> paragraphs;
  std::size_t summary_paragraphs = 0;

  std::string text() const;          // paragraphs joined by blank lines
  std::string summary_text() const;  // the first `summary_paragraphs` only
};

/// Best-effort wikitext to plain text.
///
/// Drops templates, tables, references, comments, file/category links and
/// content-only tags (math, gallery, ...); keeps link labels, list item text
/// and the inner text of formatting tags. Unbalanced markup never fails: an
/// opener without a matching closer is dropped on its own and scanning
/// continues after it.
StrippedArticle strip_article(std::string_view wikitext);

/// strip_article(wikitext).text()
std::string strip_markup(std::string_view wikitext);

}  // namespace synfact::wiki
