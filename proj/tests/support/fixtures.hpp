#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace synfact::testing {

struct DumpOptions {
  std::string language = "en";
  std::size_t articles = 20;       // namespace-0 content pages
  std::uint64_t seed = 1;
  bool extras = true;              // redirects, talk/user pages, an empty page
  bool known_pages = true;         // the hand-written pages below
  std::size_t huge_page_bytes = 0;  // when nonzero, one article of about this size
};

struct DumpSummary {
  std::size_t page_elements = 0;  // every <page>
  std::size_t articles = 0;       // pages a reader should yield
};

/// A MediaWiki XML export with realistic wikitext: infoboxes, nested
/// templates, references, tables, file and category links, headings, lists,
/// comments, entities and abbreviations. Deterministic in the options.
std::string make_dump_xml(const DumpOptions& options, DumpSummary* summary = nullptr);

/// Writes make_dump_xml to `path`, gzip- or bzip2-compressed by extension.
DumpSummary write_dump(const std::filesystem::path& path, const DumpOptions& options);

/// Wikitext of the hand-written pages, keyed by title.
std::string known_page_wikitext(const std::string& language);
std::string known_page_title(const std::string& language);

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "synfact");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace synfact::testing
