#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synfact/claimgen/chat.hpp"
#include "synfact/filtering/nli_client.hpp"

namespace synfact::pipeline {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Expands ${VAR} and ${VAR:-default}; "$$" is a literal '$'. An unset
/// variable without a default is a ConfigError naming it.
std::string interpolate_env(std::string_view text, const EnvLookup& env = process_env);

struct PipelineConfig {
  std::vector<std::string> languages;
  std::map<std::string, std::filesystem::path> dumps;  // language -> dump file
  std::map<std::string, std::string> language_names;  // optional overrides for prompts
  std::size_t entry_sample_size = 30000;
  std::uint64_t seed = 0;
  std::string prompt_version = "v1";
  std::optional<std::filesystem::path> prompt_dir;  // unset: compiled-in templates

  claimgen::ChatEndpoint chat;
  std::size_t chat_concurrency = 8;

  filtering::NliEndpoint nli;
  std::size_t nli_concurrency = 2;

  bool llm_filter = true;
  bool nli_filter = true;
  bool drop_over_length = false;

  std::filesystem::path output_dir = "out";

  std::size_t review_per_class = 10;
  std::vector<std::string> raters = {"rater1", "rater2"};

  /// Checks the invariants: languages non-empty, entry_sample_size > 0, a
  /// dump path and a prompt language name for every language, endpoints set.
  void validate() const;

  /// Canonical form: every field, resolved values, keys sorted.
  nlohmann::json to_json() const;

  /// FNV-1a of the canonical form, as 16 hex digits. Any field change moves it.
  std::string fingerprint() const;
};

/// Builds a config from parsed JSON. String values are interpolated first;
/// relative paths resolve against `base_dir`. Unknown keys are a ConfigError.
/// chat.base_url, chat.api_key and nli.base_url default to CHAT_BASE_URL,
/// CHAT_API_KEY and NLI_BASE_URL.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                const EnvLookup& env = process_env);

/// Reads and validates a JSON config file.
PipelineConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

}  // namespace synfact::pipeline
