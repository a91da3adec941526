#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>

#include "synfact/wikisource/types.hpp"

namespace synfact::wiki {

enum class Compression { None, Gzip, Bzip2 };

/// Picks the decompressor from the file extension: .xml (or none), .gz, .bz2.
/// Anything else is a ConfigError.
Compression compression_for(const std::filesystem::path& path);

/// Pull-based reader over a MediaWiki XML export.
///
/// Yields namespace-0, non-redirect pages with non-empty text, in document
/// order. Input is fed to expat in fixed-size chunks, so memory stays bounded
/// by the largest page plus one chunk regardless of dump size. Malformed XML
/// raises XmlError carrying the byte offset in the decompressed stream.
class PageStream {
 public:
  /// Reads from a caller-owned stream of uncompressed XML.
  PageStream(std::istream& in, std::string language);
  /// Opens a dump file, decompressing according to its extension.
  PageStream(const std::filesystem::path& path, std::string language);
  ~PageStream();
  PageStream(PageStream&&) noexcept;
  PageStream& operator=(PageStream&&) noexcept;

  std::optional<RawPage> next();

  /// Decompressed bytes handed to the XML parser so far.
  std::uint64_t bytes_consumed() const noexcept;
  /// High-water mark of page text held in memory (in-progress plus queued).
  std::size_t peak_buffered_bytes() const noexcept;
  /// Every <page> element seen, before namespace/redirect filtering.
  std::uint64_t pages_seen() const noexcept;

  static constexpr std::size_t kChunkSize = 64 * 1024;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// True when wikitext is a redirect stub (#REDIRECT and its de/es forms).
bool is_redirect_text(std::string_view wikitext);

}  // namespace synfact::wiki
