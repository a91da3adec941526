#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "synfact/records.hpp"

namespace synfact::claimgen {

/// Human-readable language names used inside prompts, keyed by ISO code.
/// Ships en/es/de; unknown codes are a ConfigError.
std::string language_name(std::string_view code, const std::map<std::string, std::string>& overrides = {});

/// The three per-class generation templates of one prompt version.
///
/// Templates carry the placeholders <language> (also written {language}),
/// <topic> and <sources>. Version "v1" is compiled in; other versions load
/// from <dir>/<version>/{supports,refutes,not-info}.txt.
class PromptSet {
 public:
  static PromptSet builtin();
  static PromptSet load(const std::filesystem::path& root, const std::string& version);

  const std::string& version() const noexcept { return version_; }
  const std::string& template_text(ClaimClass c) const { return templates_[static_cast<std::size_t>(c)]; }

  /// Restricts which language names build() accepts. Defaults to the
  /// shipped English/Spanish/German names.
  void set_languages(std::set<std::string> names) { languages_ = std::move(names); }
  const std::set<std::string>& languages() const noexcept { return languages_; }

  /// Substitutes the placeholders in one pass; substituted values are never
  /// rescanned, so sources are inserted verbatim. Throws ConfigError on an
  /// unconfigured language or an empty topic/sources.
  std::string build(ClaimClass c, std::string_view language, std::string_view topic, std::string_view sources) const;

 private:
  std::string version_;
  std::array<std::string, 3> templates_;
  std::set<std::string> languages_;
};

/// Same as prompts.build(...).
std::string build_prompt(const PromptSet& prompts, ClaimClass c, std::string_view language, std::string_view topic,
                         std::string_view sources);

/// The file stem a class's template is stored under.
std::string_view template_file_stem(ClaimClass c) noexcept;

}  // namespace synfact::claimgen
