#include "synfact/wikisource/markup.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

#include "synfact/common/unicode.hpp"

namespace synfact::wiki {

namespace {

bool ieq_prefix(std::string_view s, std::size_t pos, std::string_view lower_word) {
  if (s.size() - pos < lower_word.size()) return false;
  for (std::size_t k = 0; k < lower_word.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[pos + k])) != lower_word[k]) return false;
  }
  return true;
}

bool starts_at(std::string_view s, std::size_t pos, std::string_view what) {
  return s.size() - pos >= what.size() && s.compare(pos, what.size(), what) == 0;
}

bool at_line_start(std::string_view s, std::size_t pos) {
  while (pos > 0) {
    const char c = s[pos - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t') return false;
    --pos;
  }
  return true;
}

std::string remove_comments(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto open = s.find("<!--", i);
    if (open == std::string_view::npos) {
      out.append(s.substr(i));
      break;
    }
    out.append(s.substr(i, open - i));
    const auto close = s.find("-->", open + 4);
    if (close == std::string_view::npos) break;  // unterminated: comment runs to the end
    i = close + 3;
  }
  return out;
}

// Tags whose whole content is dropped.
constexpr std::array<std::string_view, 14> kDroppedTags = {
    "ref",    "references", "math",       "chem",  "gallery",   "timeline",  "syntaxhighlight",
    "source", "score",      "graph",      "mapframe", "imagemap", "templatedata", "hiero"};

std::string remove_dropped_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
    std::string name(s.substr(i + 1, j - i - 1));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    const bool dropped = !name.empty() && std::find(kDroppedTags.begin(), kDroppedTags.end(), name) != kDroppedTags.end();
    const auto gt = s.find('>', j);
    if (!dropped || gt == std::string_view::npos) {
      out.push_back(s[i++]);
      continue;
    }
    if (s[gt - 1] == '/') {  // <ref name="x" />
      i = gt + 1;
      continue;
    }
    // Find the matching close tag, case-insensitively.
    std::size_t k = gt + 1;
    std::size_t end = std::string_view::npos;
    while ((k = s.find("</", k)) != std::string_view::npos) {
      if (ieq_prefix(s, k + 2, name)) {
        const auto close_gt = s.find('>', k);
        end = close_gt == std::string_view::npos ? s.size() : close_gt + 1;
        break;
      }
      k += 2;
    }
    // Unclosed: drop the opening tag alone.
    i = end == std::string_view::npos ? gt + 1 : end;
  }
  return out;
}

enum class Block { Template, Table };

// `pos` is at "{{" or a line-start "{|". Returns one past the matching closer,
// or npos when the block never closes.
std::size_t match_brace_block(std::string_view s, std::size_t pos) {
  std::vector<Block> stack;
  std::size_t i = pos;
  while (i < s.size()) {
    if (starts_at(s, i, "{{")) {
      stack.push_back(Block::Template);
      i += 2;
    } else if (starts_at(s, i, "{|") && at_line_start(s, i)) {
      stack.push_back(Block::Table);
      i += 2;
    } else if (starts_at(s, i, "}}") && !stack.empty() && stack.back() == Block::Template) {
      stack.pop_back();
      i += 2;
    } else if (starts_at(s, i, "|}") && !stack.empty() && stack.back() == Block::Table && at_line_start(s, i)) {
      stack.pop_back();
      i += 2;
    } else {
      ++i;
    }
    if (stack.empty()) return i;
  }
  return std::string_view::npos;
}

std::string remove_templates_and_tables(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const bool opener = starts_at(s, i, "{{") || (starts_at(s, i, "{|") && at_line_start(s, i));
    if (!opener) {
      out.push_back(s[i++]);
      continue;
    }
    const auto end = match_brace_block(s, i);
    i = end == std::string_view::npos ? i + 2 : end;
  }
  return out;
}

// `pos` is at "[[". Returns one past the matching "]]" or npos.
std::size_t match_link(std::string_view s, std::size_t pos) {
  int depth = 0;
  std::size_t i = pos;
  while (i < s.size()) {
    if (starts_at(s, i, "[[")) {
      ++depth;
      i += 2;
    } else if (starts_at(s, i, "]]")) {
      --depth;
      i += 2;
      if (depth == 0) return i;
    } else if (s[i] == '\n' && i + 1 < s.size() && s[i + 1] == '\n' && depth == 1) {
      return std::string_view::npos;  // links never span paragraphs
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

std::vector<std::string_view> split_top_level_pipes(std::string_view inner) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (starts_at(inner, i, "[[")) {
      ++depth;
      ++i;
    } else if (starts_at(inner, i, "]]")) {
      --depth;
      ++i;
    } else if (inner[i] == '|' && depth == 0) {
      parts.push_back(inner.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(inner.substr(start));
  return parts;
}

// Link namespaces whose links render as media or metadata, not prose.
constexpr std::array<std::string_view, 12> kDroppedNamespaces = {
    "file",    "image",    "media",     "datei",     "bild",     "archivo",
    "imagen",  "fichero",  "category",  "kategorie", "categoría", "categoria"};

bool is_dropped_target(std::string_view target) {
  while (!target.empty() && target.front() == ' ') target.remove_prefix(1);
  const bool leading_colon = !target.empty() && target.front() == ':';
  if (leading_colon) target.remove_prefix(1);
  const auto colon = target.find(':');
  if (colon == std::string_view::npos) return false;
  std::string prefix = unicode::to_lower(target.substr(0, colon));
  while (!prefix.empty() && prefix.back() == ' ') prefix.pop_back();
  if (std::find(kDroppedNamespaces.begin(), kDroppedNamespaces.end(), prefix) != kDroppedNamespaces.end()) {
    // [[:Category:X]] is an inline link to the category page, not a tag.
    return !(leading_colon && (prefix == "category" || prefix == "kategorie" || prefix == "categoría"));
  }
  // Interlanguage links such as [[de:Berbice]].
  const bool lang_code = prefix.size() >= 2 && prefix.size() <= 3 &&
                         std::all_of(prefix.begin(), prefix.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  return lang_code && !leading_colon;
}

std::string process_links(std::string_view s);

std::string link_text(std::string_view inner) {
  const auto parts = split_top_level_pipes(inner);
  std::string_view target = parts.front();
  if (is_dropped_target(target)) return {};
  if (parts.size() > 1) {
    std::string label;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      if (k > 1) label += '|';
      label.append(parts[k]);
    }
    if (label.find_first_not_of(' ') != std::string::npos) return process_links(label);
    // Pipe trick: [[Paris (France)|]] renders as "Paris".
    const auto paren = target.find(" (");
    if (paren != std::string_view::npos) target = target.substr(0, paren);
  }
  while (!target.empty() && (target.front() == ':' || target.front() == ' ')) target.remove_prefix(1);
  return std::string(target);
}

bool is_url_start(std::string_view s, std::size_t pos) {
  for (auto scheme : {"http://", "https://", "ftp://", "//", "mailto:"}) {
    if (ieq_prefix(s, pos, scheme)) return true;
  }
  return false;
}

std::string process_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (starts_at(s, i, "[[")) {
      const auto end = match_link(s, i);
      if (end == std::string_view::npos) {
        i += 2;
        continue;
      }
      out += link_text(s.substr(i + 2, end - i - 4));
      i = end;
      continue;
    }
    if (s[i] == '[' && is_url_start(s, i + 1)) {
      const auto close = s.find_first_of("]\n", i);
      if (close != std::string_view::npos && s[close] == ']') {
        const auto inner = s.substr(i + 1, close - i - 1);
        const auto space = inner.find(' ');
        if (space != std::string_view::npos) out.append(inner.substr(space + 1));
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool is_heading(std::string_view line) {
  while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.remove_suffix(1);
  if (line.size() < 3 || line.front() != '=' || line.back() != '=') return false;
  return line.find_first_not_of('=') != std::string_view::npos;
}

std::string remove_html_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<' && i + 1 < s.size() &&
        (std::isalpha(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '/')) {
      const auto gt = s.find('>', i);
      if (gt != std::string_view::npos && gt - i < 256 && s.substr(i, gt - i).find('<', 1) == std::string_view::npos) {
        if (ieq_prefix(s, i + 1, "br")) out.push_back(' ');
        i = gt + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

struct Entity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<Entity, 26> kEntities = {{
    {"nbsp", U' '},       {"amp", U'&'},        {"lt", U'<'},        {"gt", U'>'},       {"quot", U'"'},
    {"apos", U'\''},      {"ndash", U'–'}, {"mdash", U'—'}, {"hellip", U'…'}, {"laquo", U'«'},
    {"raquo", U'»'}, {"lsquo", U'‘'}, {"rsquo", U'’'}, {"ldquo", U'“'}, {"rdquo", U'”'},
    {"bdquo", U'„'}, {"shy", 0},           {"thinsp", U' '},     {"ensp", U' '},     {"emsp", U' '},
    {"minus", U'−'}, {"times", U'×'}, {"deg", U'°'},   {"euro", U'€'}, {"middot", U'·'},
    {"zwj", 0},
}};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      const auto semi = s.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        const auto name = s.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (!name.empty() && name.front() == '#') {
          const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
          const auto digits = name.substr(hex ? 2 : 1);
          if (!digits.empty() && digits.size() <= 7 &&
              std::all_of(digits.begin(), digits.end(),
                          [hex](char c) { return hex ? std::isxdigit(static_cast<unsigned char>(c)) != 0
                                                     : std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
            const auto cp = static_cast<char32_t>(std::stoul(std::string(digits), nullptr, hex ? 16 : 10));
            if (cp > 0 && cp <= 0x10ffff && !(cp >= 0xd800 && cp <= 0xdfff)) unicode::append_utf8(out, cp);
            decoded = true;
          }
        } else {
          for (const auto& e : kEntities) {
            if (e.name == name) {
              if (e.cp != 0) unicode::append_utf8(out, e.cp);
              decoded = true;
              break;
            }
          }
        }
        if (decoded) {
          i = semi + 1;
          continue;
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string remove_emphasis_and_magic(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
      while (i < s.size() && s[i] == '\'') ++i;
      continue;
    }
    if (starts_at(s, i, "__")) {
      std::size_t j = i + 2;
      while (j < s.size() && std::isupper(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i + 2 && starts_at(s, j, "__")) {
        i = j + 2;
        continue;
      }
    }
    // Stray brace/bracket pairs left behind by unbalanced markup.
    if (starts_at(s, i, "{{") || starts_at(s, i, "}}") || starts_at(s, i, "[[") || starts_at(s, i, "]]")) {
      i += 2;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool is_closing_punct(char c) { return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')'; }

// Tidies the gaps removed markup leaves behind: " ," -> ",", "( x" -> "(x",
// and parentheses holding nothing but punctuation.
std::string tidy_spacing(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ' ' && i + 1 < s.size() && is_closing_punct(s[i + 1])) continue;
    if (c == ' ' && !out.empty() && out.back() == '(') continue;
    out.push_back(c);
  }
  std::string cleaned;
  cleaned.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '(') {
      const auto close = out.find(')', i);
      if (close != std::string::npos) {
        const auto inner = std::string_view(out).substr(i + 1, close - i - 1);
        if (inner.find_first_not_of(" ,;:.") == std::string_view::npos) {
          if (!cleaned.empty() && cleaned.back() == ' ' && close + 1 < out.size() &&
              (out[close + 1] == ' ' || is_closing_punct(out[close + 1]))) {
            cleaned.pop_back();
          }
          i = close;
          continue;
        }
      }
    }
    cleaned.push_back(out[i]);
  }
  return cleaned;
}

std::string finish_paragraph(std::string_view raw) {
  std::string text = remove_emphasis_and_magic(raw);
  text = remove_html_tags(text);
  text = decode_entities(text);
  text = unicode::normalize_space(text);
  text = tidy_spacing(text);
  // A paragraph of leftover punctuation carries nothing.
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (unicode::is_alnum(unicode::decode(text, pos))) return text;
  }
  return {};
}

}  // namespace

std::string StrippedArticle::text() const {
  std::string out;
  for (const auto& p : paragraphs) {
    if (!out.empty()) out += "\n\n";
    out += p;
  }
  return out;
}

std::string StrippedArticle::summary_text() const {
  std::string out;
  for (std::size_t i = 0; i < summary_paragraphs && i < paragraphs.size(); ++i) {
    if (!out.empty()) out += "\n\n";
    out += paragraphs[i];
  }
  return out;
}

StrippedArticle strip_article(std::string_view wikitext) {
  std::string s = remove_comments(wikitext);
  s = remove_dropped_tags(s);
  s = remove_templates_and_tables(s);
  s = process_links(s);

  StrippedArticle article;
  bool seen_heading = false;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      auto para = finish_paragraph(current);
      if (!para.empty()) article.paragraphs.push_back(std::move(para));
      current.clear();
    }
  };

  std::size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    if (nl == std::string::npos) nl = s.size();
    std::string_view line = std::string_view(s).substr(start, nl - start);
    start = nl + 1;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      flush();
      continue;
    }
    if (is_heading(line)) {
      flush();
      if (!seen_heading) {
        seen_heading = true;
        article.summary_paragraphs = article.paragraphs.size();
      }
      continue;
    }
    const char lead = line[first];
    if (starts_at(line, first, "----")) {
      flush();
      continue;
    }
    if (lead == '|' || lead == '!') continue;  // orphaned table rows
    if (lead == '*' || lead == '#' || lead == ':' || lead == ';') {
      flush();
      const auto body = line.find_first_not_of("*#:; \t", first);
      if (body != std::string_view::npos) current.append(line.substr(body));
      flush();
      continue;
    }
    if (!current.empty()) current.push_back(' ');
    current.append(line);
  }
  flush();
  if (!seen_heading) article.summary_paragraphs = article.paragraphs.size();
  return article;
}

std::string strip_markup(std::string_view wikitext) { return strip_article(wikitext).text(); }

}  // namespace synfact::wiki
