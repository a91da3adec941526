#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synfact/records.hpp"

namespace synfact::humaneval {

/// Draws up to `per_class` records of each target class, reproducibly from
/// `seed`. Only records that passed the NLI filter are eligible. Output is
/// sorted by claim_id.
std::vector<ClaimRecord> sample_for_review(const std::vector<ClaimRecord>& records, std::size_t per_class,
                                           std::uint64_t seed);

/// Column order of review sheets.
inline constexpr std::array<std::string_view, 10> kSheetColumns = {
    "claim_id",          "language",           "target_class",       "source_text",   "claim",
    "overall_quality",   "grammaticality",     "semantic_relation",  "label_correct", "rater_id"};

/// Writes one TSV sheet per rater with the rating columns blank. Tabs,
/// newlines and backslashes in text are escaped as \t, \n and \\.
/// Returns the written paths.
std::vector<std::filesystem::path> export_review_sheets(const std::vector<ClaimRecord>& sample,
                                                        const std::filesystem::path& dir,
                                                        const std::vector<std::string>& raters = {"rater1",
                                                                                                  "rater2"});

std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

struct Rating {
  std::string claim_id;
  std::string rater_id;
  std::string target_class;
  int overall_quality = 0;    // 1-5
  int grammaticality = 0;     // 1-5
  int semantic_relation = 0;  // 1-5
  bool label_correct = false;
};

struct RowError {
  std::string file;
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<Rating> ratings;
  std::vector<RowError> errors;
  std::size_t blank_rows = 0;  // rows not yet filled in
};

/// Reads filled-in sheets. Malformed rows are collected as row errors with
/// their line number and do not stop ingestion; unfilled rows are counted and
/// skipped. A second rating for the same (claim_id, rater_id) is a hard
/// IntegrityError. A missing or wrong header raises ConfigError.
IngestResult ingest_ratings(const std::vector<std::filesystem::path>& sheets);

/// Mean of one aspect over all ratings; unset when there are none.
struct AspectMeans {
  std::optional<double> overall_quality;
  std::optional<double> grammaticality;
  std::optional<double> semantic_relation;
  std::optional<double> label_correct;  // fraction of "yes", reported only
};

struct ConvergenceReport {
  AspectMeans overall;
  std::map<std::string, AspectMeans> by_class;
  std::size_t rating_count = 0;
  double threshold = 4.0;
  bool converged = false;
  std::vector<std::string> failing;  // aspects at or below the threshold
};

/// Converged when each of the three 1-5 aspects has a mean strictly above
/// `threshold` across all ratings. No ratings is never converged.
ConvergenceReport check_convergence(const std::vector<Rating>& ratings, double threshold = 4.0);

nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace synfact::humaneval
