#include "synfact/wikisource/dump_reader.hpp"

#include <expat.h>

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <vector>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "synfact/common/errors.hpp"
#include "synfact/common/unicode.hpp"

namespace synfact::wiki {

namespace fs = std::filesystem;
namespace bio = boost::iostreams;

Compression compression_for(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext.empty() || ext == ".xml") return Compression::None;
  if (ext == ".gz") return Compression::Gzip;
  if (ext == ".bz2") return Compression::Bzip2;
  throw ConfigError("unsupported dump compression '" + ext + "' for " + path.string() +
                    " (expected .xml, .gz or .bz2)");
}

bool is_redirect_text(std::string_view wikitext) {
  std::size_t i = 0;
  while (i < wikitext.size() && std::isspace(static_cast<unsigned char>(wikitext[i]))) ++i;
  if (i >= wikitext.size() || wikitext[i] != '#') return false;
  // Folded with ICU so "#REDIRECCIÓN" matches too.
  const auto head = unicode::to_lower(wikitext.substr(i, 32));
  static constexpr std::string_view kKeywords[] = {"#redirect", "#weiterleitung", "#redirección", "#redireccion"};
  for (auto kw : kKeywords) {
    if (head.starts_with(kw)) return true;
  }
  return false;
}

struct PageStream::Impl {
  std::unique_ptr<std::ifstream> file;
  std::unique_ptr<bio::filtering_istream> filtered;
  std::istream* in = nullptr;
  std::string language;

  XML_Parser parser = nullptr;
  std::vector<char> chunk = std::vector<char>(kChunkSize);
  bool finished = false;
  std::uint64_t consumed = 0;
  std::uint64_t seen = 0;

  // Element stack while inside <page>; empty outside.
  std::vector<std::string> stack;
  bool in_page = false;
  std::string* capture = nullptr;
  std::string title, ns_text, id_text, text;
  bool redirect = false;

  std::string pending_error;
  std::uint64_t pending_offset = 0;

  std::deque<RawPage> ready;
  std::size_t ready_bytes = 0;
  std::size_t peak = 0;

  explicit Impl(std::string lang) : language(std::move(lang)) {
    parser = XML_ParserCreate("UTF-8");
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_chars);
  }
  ~Impl() {
    if (parser) XML_ParserFree(parser);
  }

  std::size_t in_progress_bytes() const { return title.size() + text.size(); }

  void note_usage() { peak = std::max(peak, ready_bytes + in_progress_bytes()); }

  static std::string_view local_name(const XML_Char* name) { return std::string_view(name); }

  static void on_start(void* ud, const XML_Char* name, const XML_Char** /*atts*/) {
    auto* self = static_cast<Impl*>(ud);
    const auto tag = local_name(name);
    if (!self->in_page) {
      if (tag == "page") {
        self->in_page = true;
        self->stack.assign(1, "page");
        self->title.clear();
        self->ns_text.clear();
        self->id_text.clear();
        self->text.clear();
        self->redirect = false;
        ++self->seen;
      }
      return;
    }
    const std::string& parent = self->stack.back();
    self->capture = nullptr;
    if (parent == "page") {
      if (tag == "title") self->capture = &self->title;
      else if (tag == "ns") self->capture = &self->ns_text;
      else if (tag == "id") self->capture = &self->id_text;
      else if (tag == "redirect") self->redirect = true;
    } else if (parent == "revision" && tag == "text") {
      self->capture = &self->text;
    }
    self->stack.emplace_back(tag);
  }

  static void on_end(void* ud, const XML_Char* name) {
    auto* self = static_cast<Impl*>(ud);
    if (!self->in_page) return;
    self->capture = nullptr;
    self->stack.pop_back();
    if (!self->stack.empty() || local_name(name) != "page") return;
    self->in_page = false;
    self->finish_page();
  }

  static void on_chars(void* ud, const XML_Char* s, int len) {
    auto* self = static_cast<Impl*>(ud);
    if (self->capture) {
      self->capture->append(s, static_cast<std::size_t>(len));
      self->note_usage();
    }
  }

  void finish_page() {
    int ns = 0;
    if (!ns_text.empty()) {
      try {
        ns = std::stoi(ns_text);
      } catch (const std::exception&) {
        ns = -1;
      }
    }
    const bool keep = ns == 0 && !redirect && !text.empty() && !is_redirect_text(text);
    if (keep) {
      RawPage page;
      try {
        page.page_id = std::stoull(id_text);
      } catch (const std::exception&) {
        // Never unwind through expat; report after XML_Parse returns.
        pending_error = "page '" + title + "' has no numeric <id>";
        pending_offset = static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser));
        XML_StopParser(parser, XML_FALSE);
        return;
      }
      page.title = std::move(title);
      page.ns = ns;
      page.wikitext = std::move(text);
      page.language = language;
      ready_bytes += page.title.size() + page.wikitext.size();
      ready.push_back(std::move(page));
    }
    title.clear();
    text.clear();
    note_usage();
  }

  void feed() {
    in->read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = static_cast<std::size_t>(in->gcount());
    if (in->bad()) throw Error("read error while streaming dump");
    const bool last = got < chunk.size();
    consumed += got;
    if (XML_Parse(parser, chunk.data(), static_cast<int>(got), last ? 1 : 0) == XML_STATUS_ERROR) {
      if (!pending_error.empty()) throw XmlError(pending_error, pending_offset);
      throw XmlError(std::string("malformed dump XML: ") + XML_ErrorString(XML_GetErrorCode(parser)),
                     static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
    }
    if (last) finished = true;
  }
};

PageStream::PageStream(std::istream& in, std::string language) : impl_(std::make_unique<Impl>(std::move(language))) {
  impl_->in = &in;
}

PageStream::PageStream(const fs::path& path, std::string language)
    : impl_(std::make_unique<Impl>(std::move(language))) {
  const auto compression = compression_for(path);
  impl_->file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*impl_->file) throw ConfigError("cannot open dump " + path.string());
  if (compression == Compression::None) {
    impl_->in = impl_->file.get();
    return;
  }
  impl_->filtered = std::make_unique<bio::filtering_istream>();
  if (compression == Compression::Gzip) impl_->filtered->push(bio::gzip_decompressor());
  else impl_->filtered->push(bio::bzip2_decompressor());
  impl_->filtered->push(*impl_->file);
  impl_->in = impl_->filtered.get();
}

PageStream::~PageStream() = default;
PageStream::PageStream(PageStream&&) noexcept = default;
PageStream& PageStream::operator=(PageStream&&) noexcept = default;

std::optional<RawPage> PageStream::next() {
  auto& s = *impl_;
  while (s.ready.empty()) {
    if (s.finished) return std::nullopt;
    try {
      s.feed();
    } catch (const bio::gzip_error& e) {
      throw Error(std::string("gzip decompression failed: ") + e.what());
    } catch (const bio::bzip2_error& e) {
      throw Error(std::string("bzip2 decompression failed: ") + e.what());
    }
  }
  RawPage page = std::move(s.ready.front());
  s.ready.pop_front();
  s.ready_bytes -= page.title.size() + page.wikitext.size();
  return page;
}

std::uint64_t PageStream::bytes_consumed() const noexcept { return impl_->consumed; }
std::size_t PageStream::peak_buffered_bytes() const noexcept { return impl_->peak; }
std::uint64_t PageStream::pages_seen() const noexcept { return impl_->seen; }

}  // namespace synfact::wiki
