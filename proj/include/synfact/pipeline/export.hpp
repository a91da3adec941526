#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synfact/records.hpp"

namespace synfact::pipeline {

inline constexpr int kSchemaVersion = 1;

enum class Variant { NoMnliFiltering, MnliFiltering };

/// "no_mnli_filtering" / "mnli_filtering".
std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view text);

/// Whether a record with final status belongs to a variant: no_mnli takes
/// everything that passed the LLM filter, mnli only what also passed NLI.
bool in_variant(const ClaimRecord& record, Variant v) noexcept;

using ClassCounts = std::array<std::size_t, 3>;  // indexed by ClaimClass

struct Manifest {
  int schema_version = kSchemaVersion;
  Variant variant = Variant::NoMnliFiltering;
  std::map<std::string, ClassCounts> counts;  // language -> per-class counts
  std::size_t total = 0;

  bool operator==(const Manifest&) const = default;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest read_manifest(const std::filesystem::path& path);

struct ExportedFiles {
  std::filesystem::path data;
  std::filesystem::path manifest;
  Manifest contents;
};

/// Writes `<dir>/<variant>.jsonl` (records of the variant, claim_id
/// ascending, each tagged with schema_version) and `<dir>/<variant>.manifest.json`,
/// both via temp file and rename. Every language in `languages` gets a
/// manifest row even when empty.
ExportedFiles export_dataset(const std::vector<ClaimRecord>& records, Variant variant,
                             const std::filesystem::path& dir, const std::vector<std::string>& languages = {});

/// Serialized line for one record (no trailing newline).
std::string export_line(const ClaimRecord& record);

/// Reads an exported variant back. Rejects other schema versions.
std::vector<ClaimRecord> load_dataset(const std::filesystem::path& path);

struct DistributionRow {
  std::string language;
  ClassCounts no_mnli{};
  std::optional<ClassCounts> mnli;  // unset when the run had no NLI stage
};

/// Per-language class counts for both variants. Throws IntegrityError when a
/// mnli cell exceeds its no_mnli cell, or when the variants are mislabelled.
std::vector<DistributionRow> report_distribution(const Manifest& no_mnli, const Manifest* mnli = nullptr);

/// Fixed-width table: one line per language and variant plus a total line.
std::string format_distribution(const std::vector<DistributionRow>& rows);

nlohmann::json to_json(const std::vector<DistributionRow>& rows);

}  // namespace synfact::pipeline
