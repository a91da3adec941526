#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "synfact/metrics/similarity.hpp"
#include "synfact/records.hpp"

namespace synfact::metrics {

/// One (language, class) row of the dataset statistics report. Means are
/// empty when the group has no records.
struct DatasetStats {
  std::string language;
  ClaimClass cls = ClaimClass::Supports;
  std::size_t count = 0;
  std::optional<double> words_mu;
  std::optional<double> words_sd;  // population standard deviation
  std::optional<double> mean_self_contained;
  std::optional<double> mean_support;
  std::optional<double> mean_objective;
  std::optional<double> mean_quality;
  std::optional<double> mean_bleu4;
  std::optional<double> mean_rouge_l;
  std::optional<double> mean_meteor;
};

/// Mergeable running moments for one group (Chan et al. pairwise update).
class GroupAccumulator {
 public:
  void add(int words, const GenerationJudgment& judgment, const SimilarityScores& sim);
  void merge(const GroupAccumulator& other);
  DatasetStats finish(std::string language, ClaimClass cls) const;

  static GroupAccumulator from_stats(const DatasetStats& stats);

 private:
  static constexpr std::size_t kMeans = 7;
  std::size_t n_ = 0;
  double words_mean_ = 0.0;
  double words_m2_ = 0.0;
  std::array<double, kMeans> means_{};
};

/// Per-(language, class) statistics for records that carry a judgment, with
/// source text as reference and claim as candidate for the similarity metrics.
/// Rows are ordered by language ascending, then supports, refutes, not-info.
/// Every language in `languages` (plus any seen in `records`) gets three rows.
std::vector<DatasetStats> compute_stats(std::span<const ClaimRecord> records,
                                        std::span<const std::string> languages = {});

/// Combines two rows of the same group as if computed over the union.
DatasetStats merge_stats(const DatasetStats& a, const DatasetStats& b);

/// Tab-separated report in the column order
/// language, class, count, words_mu, words_sd, self-contained, support,
/// objective, quality, BLEU-4, ROUGE-L, METEOR. Empty means print as "-".
std::string format_stats_tsv(std::span<const DatasetStats> rows);

void to_json(nlohmann::json& j, const DatasetStats& s);

}  // namespace synfact::metrics
