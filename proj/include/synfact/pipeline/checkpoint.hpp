#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "synfact/records.hpp"
#include "synfact/wikisource/types.hpp"

namespace synfact::pipeline {

enum class CheckpointStage { None, Sampled, Generated, LlmFiltered, NliFiltered, Exported };

std::string_view to_string(CheckpointStage s) noexcept;
CheckpointStage parse_checkpoint_stage(std::string_view text);

/// A finished chat call. `reply` is unset when the endpoint refused the
/// request with a non-retryable error; such slots are not retried either.
struct GenerationEntry {
  std::string claim_id;
  std::optional<std::string> reply;
  std::string failure;  // "endpoint_error" when reply is unset
  int retries = 0;
};

/// On-disk run state under `<dir>`:
///
///   state.json         fingerprint and stage (rewritten atomically)
///   sources.jsonl      sampled knowledge sources (written once, atomically)
///   generations.jsonl  one GenerationEntry per line, append-only
///   nli.jsonl          one {claim_id, nli} per line, append-only
///
/// Appends are flushed per line; a torn final line from a crash is ignored on
/// reload. The store is the only writer of these files.
class CheckpointStore {
 public:
  /// Opens or creates the store. An existing store with another fingerprint
  /// is a ConfigError; so is an existing store when `resume` is false.
  CheckpointStore(std::filesystem::path dir, std::string fingerprint, bool resume);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  CheckpointStage stage() const noexcept { return stage_; }
  bool existed() const noexcept { return existed_; }

  /// Moves the stage forward; never backward.
  void advance(CheckpointStage stage);

  void save_sources(const std::vector<wiki::KnowledgeSource>& sources);
  std::optional<std::vector<wiki::KnowledgeSource>> load_sources() const;

  void append_generation(const GenerationEntry& entry);
  const std::map<std::string, GenerationEntry>& generations() const noexcept { return generations_; }

  void append_verdict(const std::string& claim_id, const NliVerdict& verdict);
  const std::map<std::string, NliVerdict>& verdicts() const noexcept { return verdicts_; }

 private:
  void write_state() const;
  void load();

  std::filesystem::path dir_;
  std::string fingerprint_;
  CheckpointStage stage_ = CheckpointStage::None;
  bool existed_ = false;
  std::map<std::string, GenerationEntry> generations_;
  std::map<std::string, NliVerdict> verdicts_;
  std::ofstream generations_out_;
  std::ofstream nli_out_;
  std::mutex mu_;
};

}  // namespace synfact::pipeline
