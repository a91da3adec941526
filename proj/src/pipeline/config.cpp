#include "synfact/pipeline/config.hpp"

#include <cstdlib>
#include <set>

#include "synfact/claimgen/prompts.hpp"
#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"
#include "synfact/common/hash.hpp"

namespace synfact::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::string interpolate_env(std::string_view text, const EnvLookup& env) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    if (text[i + 1] == '$') {
      out += '$';
      ++i;
      continue;
    }
    if (text[i + 1] != '{') {
      out += '$';
      continue;
    }
    const auto close = text.find('}', i + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated ${ in '" + std::string(text) + "'");
    const auto inner = text.substr(i + 2, close - i - 2);
    const auto sep = inner.find(":-");
    const std::string name(inner.substr(0, sep));
    if (name.empty()) throw ConfigError("empty variable name in '" + std::string(text) + "'");
    auto value = env(name);
    if (!value || (value->empty() && sep != std::string_view::npos)) {
      if (sep == std::string_view::npos) throw ConfigError("environment variable " + name + " is not set");
      value = std::string(inner.substr(sep + 2));
    }
    out += *value;
    i = close;
  }
  return out;
}

namespace {

json interpolate_all(const json& j, const EnvLookup& env) {
  if (j.is_string()) return interpolate_env(j.get<std::string>(), env);
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(interpolate_all(v, env));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = interpolate_all(it.value(), env);
    return out;
  }
  return j;
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + " has the wrong type");
  }
}

// Numbers may arrive as strings after interpolation ("${PORT:-8080}").
template <typename T>
void read_number(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  try {
    if (v.is_string()) {
      const auto& s = v.get_ref<const std::string&>();
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) out = static_cast<T>(std::stod(s, &used));
      else if constexpr (std::is_signed_v<T>) out = static_cast<T>(std::stoll(s, &used));
      else {
        if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
        out = static_cast<T>(std::stoull(s, &used));
      }
      if (used != s.size()) throw std::invalid_argument("trailing");
    } else {
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && v.get<long long>() < 0) throw std::invalid_argument("negative");
      }
      out = v.get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError(std::string(where) + "." + key + " is not a valid number");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

RetryPolicy read_retry(const json& obj, std::string_view where) {
  RetryPolicy r;
  read_number(obj, "max_retries", r.max_retries, where);
  long long initial = r.initial_backoff.count(), max = r.max_backoff.count();
  read_number(obj, "initial_backoff_ms", initial, where);
  read_number(obj, "max_backoff_ms", max, where);
  read_number(obj, "backoff_multiplier", r.multiplier, where);
  r.initial_backoff = std::chrono::milliseconds(initial);
  r.max_backoff = std::chrono::milliseconds(max);
  return r;
}

json retry_json(const RetryPolicy& r) {
  return {{"max_retries", r.max_retries},
          {"initial_backoff_ms", r.initial_backoff.count()},
          {"max_backoff_ms", r.max_backoff.count()},
          {"backoff_multiplier", r.multiplier}};
}

}  // namespace

PipelineConfig config_from_json(const json& raw, const fs::path& base_dir, const EnvLookup& env) {
  const json j = interpolate_all(raw, env);
  check_keys(j, "config",
             {"languages", "dumps", "language_names", "entry_sample_size", "seed", "prompt_version", "prompt_dir",
              "chat", "nli", "filters", "output_dir", "review"});
  PipelineConfig c;
  // Endpoint settings missing from the file fall back to the environment.
  c.chat.base_url = env("CHAT_BASE_URL").value_or("");
  c.chat.api_key = env("CHAT_API_KEY").value_or("");
  c.nli.base_url = env("NLI_BASE_URL").value_or("");
  read(j, "languages", c.languages, "config");
  if (j.contains("dumps")) {
    if (!j["dumps"].is_object()) throw ConfigError("dumps must be an object");
    for (auto it = j["dumps"].begin(); it != j["dumps"].end(); ++it) {
      if (!it->is_string()) throw ConfigError("dumps." + it.key() + " must be a path");
      c.dumps[it.key()] = resolve(base_dir, it->get<std::string>());
    }
  }
  read(j, "language_names", c.language_names, "config");
  read_number(j, "entry_sample_size", c.entry_sample_size, "config");
  read_number(j, "seed", c.seed, "config");
  read(j, "prompt_version", c.prompt_version, "config");
  if (j.contains("prompt_dir") && !j["prompt_dir"].is_null()) {
    std::string p;
    read(j, "prompt_dir", p, "config");
    c.prompt_dir = resolve(base_dir, p);
  }
  if (j.contains("chat")) {
    const auto& ch = j["chat"];
    check_keys(ch, "chat",
               {"base_url", "api_key", "model", "temperature", "max_tokens", "timeout_ms", "concurrency",
                "max_retries", "initial_backoff_ms", "max_backoff_ms", "backoff_multiplier"});
    read(ch, "base_url", c.chat.base_url, "chat");
    read(ch, "api_key", c.chat.api_key, "chat");
    read(ch, "model", c.chat.model, "chat");
    read_number(ch, "temperature", c.chat.temperature, "chat");
    read_number(ch, "max_tokens", c.chat.max_tokens, "chat");
    read_number(ch, "timeout_ms", c.chat.timeout_ms, "chat");
    read_number(ch, "concurrency", c.chat_concurrency, "chat");
    c.chat.retry = read_retry(ch, "chat");
  }
  if (j.contains("nli")) {
    const auto& n = j["nli"];
    check_keys(n, "nli",
               {"base_url", "timeout_ms", "batch_size", "concurrency", "max_retries", "initial_backoff_ms",
                "max_backoff_ms", "backoff_multiplier"});
    read(n, "base_url", c.nli.base_url, "nli");
    read_number(n, "timeout_ms", c.nli.timeout_ms, "nli");
    read_number(n, "batch_size", c.nli.batch_size, "nli");
    read_number(n, "concurrency", c.nli_concurrency, "nli");
    c.nli.retry = read_retry(n, "nli");
  }
  if (j.contains("filters")) {
    const auto& f = j["filters"];
    check_keys(f, "filters", {"llm", "nli", "drop_over_length"});
    read(f, "llm", c.llm_filter, "filters");
    read(f, "nli", c.nli_filter, "filters");
    read(f, "drop_over_length", c.drop_over_length, "filters");
  }
  if (j.contains("output_dir")) {
    std::string p;
    read(j, "output_dir", p, "config");
    c.output_dir = resolve(base_dir, p);
  } else {
    c.output_dir = resolve(base_dir, "out");
  }
  if (j.contains("review")) {
    const auto& r = j["review"];
    check_keys(r, "review", {"per_class", "raters"});
    read_number(r, "per_class", c.review_per_class, "review");
    read(r, "raters", c.raters, "review");
  }
  return c;
}

PipelineConfig load_config(const fs::path& path, const EnvLookup& env) {
  const auto text = read_file(path);
  const auto j = json::parse(text, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  auto c = config_from_json(j, fs::absolute(path).parent_path(), env);
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  if (languages.empty()) throw ConfigError("no languages configured");
  if (entry_sample_size == 0) throw ConfigError("entry_sample_size must be > 0");
  std::set<std::string> seen;
  for (const auto& lang : languages) {
    if (!seen.insert(lang).second) throw ConfigError("language '" + lang + "' listed twice");
    if (!dumps.count(lang)) throw ConfigError("no dump path for language '" + lang + "'");
    claimgen::language_name(lang, language_names);  // throws when unnamed
  }
  if (chat.base_url.empty()) throw ConfigError("chat.base_url is empty");
  if (chat_concurrency == 0) throw ConfigError("chat.concurrency must be > 0");
  if (nli_filter && nli.base_url.empty()) throw ConfigError("nli.base_url is empty while the NLI filter is on");
  if (nli.batch_size == 0 || nli_concurrency == 0) throw ConfigError("nli batch_size and concurrency must be > 0");
  if (raters.empty()) throw ConfigError("review.raters is empty");
}

json PipelineConfig::to_json() const {
  json dump_paths = json::object();
  for (const auto& [lang, p] : dumps) dump_paths[lang] = p.generic_string();
  json j;
  j["languages"] = languages;
  j["dumps"] = dump_paths;
  j["language_names"] = language_names;
  j["entry_sample_size"] = entry_sample_size;
  j["seed"] = seed;
  j["prompt_version"] = prompt_version;
  j["prompt_dir"] = prompt_dir ? json(prompt_dir->generic_string()) : json(nullptr);
  json ch = retry_json(chat.retry);
  ch["base_url"] = chat.base_url;
  ch["api_key"] = chat.api_key;
  ch["model"] = chat.model;
  ch["temperature"] = chat.temperature;
  ch["max_tokens"] = chat.max_tokens;
  ch["timeout_ms"] = chat.timeout_ms;
  ch["concurrency"] = chat_concurrency;
  j["chat"] = ch;
  json n = retry_json(nli.retry);
  n["base_url"] = nli.base_url;
  n["timeout_ms"] = nli.timeout_ms;
  n["batch_size"] = nli.batch_size;
  n["concurrency"] = nli_concurrency;
  j["nli"] = n;
  j["filters"] = {{"llm", llm_filter}, {"nli", nli_filter}, {"drop_over_length", drop_over_length}};
  j["output_dir"] = output_dir.generic_string();
  j["review"] = {{"per_class", review_per_class}, {"raters", raters}};
  return j;
}

std::string PipelineConfig::fingerprint() const { return to_hex(fnv1a64(to_json().dump())); }

}  // namespace synfact::pipeline
