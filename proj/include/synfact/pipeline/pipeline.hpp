#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synfact/claimgen/generator.hpp"
#include "synfact/common/errors.hpp"
#include "synfact/filtering/nli_client.hpp"
#include "synfact/metrics/stats.hpp"
#include "synfact/pipeline/checkpoint.hpp"
#include "synfact/pipeline/config.hpp"
#include "synfact/pipeline/export.hpp"
#include "synfact/wikisource/types.hpp"

namespace synfact::pipeline {

/// Raised when RunHooks::max_model_calls is reached. Everything finished
/// before that point is in the checkpoint.
class Interrupted : public Error {
 public:
  using Error::Error;
};

using NliFn = std::function<std::vector<NliVerdict>(const std::vector<filtering::wire::Pair>&)>;

struct RunHooks {
  claimgen::ChatFn chat;  // replaces the HTTP chat client when set
  NliFn nli;              // replaces the HTTP NLI client when set
  std::optional<std::size_t> max_model_calls;  // chat calls plus NLI requests
  bool skip_health_checks = false;
};

struct EntrySample {
  std::uint64_t eligible_pages = 0;  // article pages in the dump
  std::vector<wiki::RawPage> pages;  // the selected ones, in dump order
};

/// Uniformly samples `k` article pages (all of them if fewer) from a dump in
/// two streaming passes: count, then collect the chosen indices. The choice
/// depends only on the page count, `language` and `seed`.
EntrySample sample_entries(const std::filesystem::path& dump, const std::string& language, std::size_t k,
                           std::uint64_t seed);

struct RunReport {
  std::string fingerprint;
  std::string stage;
  std::map<std::string, std::uint64_t> eligible_pages;  // per language
  std::map<std::string, std::size_t> sampled_entries;
  std::size_t sources = 0;
  std::size_t generation_slots = 0;
  std::map<std::string, std::size_t> status_counts;
  std::map<std::string, std::size_t> drop_reasons;  // "<stage>/<reason>"
  std::size_t over_length = 0;
  std::size_t chat_calls = 0;         // issued by this process
  std::size_t chat_calls_reused = 0;  // answered from the checkpoint
  std::size_t chat_retries = 0;
  std::size_t nli_requests = 0;
  std::size_t nli_pairs = 0;
  std::size_t nli_pairs_reused = 0;
  std::map<std::string, double> stage_seconds;
  std::map<std::string, std::size_t> exported;  // variant -> records
  std::vector<DistributionRow> distribution;
};

nlohmann::json to_json(const RunReport& report);

/// Checks that every generation slot ends in exactly one terminal state per
/// language and class and that both variants nest. Throws IntegrityError.
void check_conservation(const std::vector<ClaimRecord>& records, bool nli_enabled);

/// The end-to-end flow: sample, generate, LLM filter, NLI filter, stats,
/// export. Each stage reuses whatever the checkpoint under
/// `<output_dir>/checkpoint` already holds, so no completed model call is
/// issued twice across interruptions.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, bool resume, RunHooks hooks = {});
  ~Pipeline();

  const PipelineConfig& config() const noexcept { return config_; }
  const RunReport& report() const noexcept { return report_; }
  CheckpointStage stage() const noexcept { return store_->stage(); }

  /// Fails unless the chat endpoint and (when enabled) the NLI service answer.
  void check_health() const;

  const std::vector<wiki::KnowledgeSource>& sample();
  void generate();
  /// Records with final statuses (both filters applied as configured).
  std::vector<ClaimRecord> filter();
  /// Writes the variants, their manifests and stats; returns the manifests.
  std::vector<Manifest> export_all();
  /// All stages plus the run report at `<output_dir>/run_report.json`.
  RunReport run();

  /// Records rebuilt from the checkpoint with generation results only.
  std::vector<ClaimRecord> generated_records() const;

  std::filesystem::path export_dir() const { return config_.output_dir / "export"; }

  /// Writes the report as it stands to `<output_dir>/run_report.json`.
  void write_report() const;

 private:
  void count_model_call();
  claimgen::PromptSet prompts() const;

  PipelineConfig config_;
  RunHooks hooks_;
  std::unique_ptr<CheckpointStore> store_;
  std::optional<std::vector<wiki::KnowledgeSource>> sources_;
  std::map<std::string, std::string> unavailable_;  // claim_id -> reason, this process only
  std::atomic<std::size_t> model_calls_{0};
  RunReport report_;
};

}  // namespace synfact::pipeline
