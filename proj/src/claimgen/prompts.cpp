#include "synfact/claimgen/prompts.hpp"

#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"
#include "embedded_prompts.hpp"

namespace synfact::claimgen {

std::string language_name(std::string_view code, const std::map<std::string, std::string>& overrides) {
  if (const auto it = overrides.find(std::string(code)); it != overrides.end()) return it->second;
  if (code == "en") return "English";
  if (code == "es") return "Spanish";
  if (code == "de") return "German";
  throw ConfigError("no language name configured for '" + std::string(code) + "'");
}

std::string_view template_file_stem(ClaimClass c) noexcept { return to_string(c); }

PromptSet PromptSet::builtin() {
  PromptSet set;
  set.version_ = "v1";
  set.templates_ = {std::string(embedded::kSupportsV1), std::string(embedded::kRefutesV1),
                    std::string(embedded::kNotInfoV1)};
  set.languages_ = {"English", "Spanish", "German"};
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& root, const std::string& version) {
  PromptSet set;
  set.version_ = version;
  set.languages_ = {"English", "Spanish", "German"};
  for (auto c : kAllClasses) {
    const auto path = root / version / (std::string(template_file_stem(c)) + ".txt");
    if (!std::filesystem::exists(path)) throw ConfigError("missing prompt template " + path.string());
    set.templates_[static_cast<std::size_t>(c)] = read_file(path);
  }
  return set;
}

std::string PromptSet::build(ClaimClass c, std::string_view language, std::string_view topic,
                             std::string_view sources) const {
  if (!languages_.contains(std::string(language))) {
    throw ConfigError("language '" + std::string(language) + "' is not configured for prompts " + version_);
  }
  if (topic.empty()) throw ConfigError("prompt topic must not be empty");
  if (sources.empty()) throw ConfigError("prompt sources must not be empty");

  struct Placeholder {
    std::string_view token;
    std::string_view value;
  };
  const Placeholder placeholders[] = {
      {"<language>", language}, {"{language}", language}, {"<topic>", topic}, {"<sources>", sources}};

  const std::string& tmpl = template_text(c);
  std::string out;
  out.reserve(tmpl.size() + sources.size() + topic.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '<' || tmpl[i] == '{') {
      for (const auto& p : placeholders) {
        if (tmpl.compare(i, p.token.size(), p.token) == 0) {
          out.append(p.value);
          i += p.token.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tmpl[i++]);
  }
  return out;
}

std::string build_prompt(const PromptSet& prompts, ClaimClass c, std::string_view language, std::string_view topic,
                         std::string_view sources) {
  return prompts.build(c, language, topic, sources);
}

}  // namespace synfact::claimgen
