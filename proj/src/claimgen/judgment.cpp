#include "synfact/claimgen/judgment.hpp"

#include <cctype>
#include <optional>

#include <json.hpp>

#include "synfact/common/errors.hpp"

namespace synfact::claimgen {

using nlohmann::json;

namespace {

constexpr std::string_view kClaim = "CLAIM";
constexpr std::string_view kSelfContained = "SELF-CONTAINED";
constexpr std::string_view kCategory = "CATEGORY";
constexpr std::string_view kSupported = "SUPPORTED BY ORIGINAL SENTENCE";
constexpr std::string_view kFactual = "FACTUAL";
constexpr std::string_view kObjective = "OBJECTIVE";
constexpr std::string_view kQuality = "OVERALL QUALITY";

// Index one past the '}' closing the object that opens at `open`, or npos.
std::size_t balanced_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

std::optional<json> first_object(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto end = balanced_end(raw, open);
    if (end == std::string_view::npos) continue;
    auto parsed = json::parse(raw.substr(open, end - open), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

bool same_key(std::string_view key, std::string_view name) {
  while (!key.empty() && std::isspace(static_cast<unsigned char>(key.front()))) key.remove_prefix(1);
  while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.remove_suffix(1);
  if (key.size() != name.size()) return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(key[i])) != name[i]) return false;
  }
  return true;
}

const json* field(const json& obj, std::string_view name) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (same_key(it.key(), name)) return &it.value();
  }
  return nullptr;
}

int score(const json& obj, std::string_view name) {
  const json* v = field(obj, name);
  if (!v) throw ParseFailure("missing " + std::string(name));
  long long value = 0;
  if (v->is_number_integer()) {
    value = v->get<long long>();
  } else if (v->is_number_float()) {
    const double d = v->get<double>();
    if (d != static_cast<double>(static_cast<long long>(d))) throw ParseFailure(std::string(name) + " is fractional");
    value = static_cast<long long>(d);
  } else if (v->is_string()) {
    const auto& s = v->get_ref<const std::string&>();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t digits_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && i - digits_start < 6) ++i;
    if (i == digits_start) throw ParseFailure(std::string(name) + " is not numeric: '" + s + "'");
    value = std::stoll(s.substr(digits_start, i - digits_start));
  } else {
    throw ParseFailure(std::string(name) + " has unsupported type");
  }
  if (value < 1 || value > 5) throw ParseFailure(std::string(name) + " out of range: " + std::to_string(value));
  return static_cast<int>(value);
}

Category category(const json& obj) {
  const json* v = field(obj, kCategory);
  if (!v || !v->is_string()) throw ParseFailure("missing CATEGORY");
  const auto& s = v->get_ref<const std::string&>();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] != 'C' && s[i] != 'c') continue;
    switch (s[i + 1]) {
      case '0': return Category::C0;
      case '1': return Category::C1;
      case '2': return Category::C2;
      default: break;
    }
  }
  throw ParseFailure("unmappable CATEGORY '" + s + "'");
}

}  // namespace

GenerationJudgment parse_generation(std::string_view raw) {
  const auto obj = first_object(raw);
  if (!obj) throw ParseFailure("no JSON object in model reply");

  GenerationJudgment g;
  const json* claim = field(*obj, kClaim);
  if (!claim || !claim->is_string()) throw ParseFailure("missing CLAIM");
  g.claim = claim->get<std::string>();
  const auto first = g.claim.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseFailure("empty CLAIM");
  g.claim = g.claim.substr(first, g.claim.find_last_not_of(" \t\r\n") - first + 1);

  g.category = category(*obj);
  g.self_contained = score(*obj, kSelfContained);
  g.supported_score = score(*obj, kSupported);
  g.objective = score(*obj, kObjective);
  g.overall_quality = score(*obj, kQuality);
  if (const json* f = field(*obj, kFactual)) g.factual = f->is_string() ? f->get<std::string>() : f->dump();
  return g;
}

std::string serialize_judgment(const GenerationJudgment& g) {
  nlohmann::ordered_json j;
  j[std::string(kClaim)] = g.claim;
  j[std::string(kSelfContained)] = g.self_contained;
  j[std::string(kCategory)] = std::string(to_string(g.category));
  j[std::string(kSupported)] = g.supported_score;
  j[std::string(kFactual)] = g.factual;
  j[std::string(kObjective)] = g.objective;
  j[std::string(kQuality)] = g.overall_quality;
  return j.dump();
}

}  // namespace synfact::claimgen
