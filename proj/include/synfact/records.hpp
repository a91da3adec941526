#pragma once

// Shared data model: what flows between generation, filtering, metrics,
// review and export.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace synfact {

enum class ClaimClass { Supports, Refutes, NotInfo };

inline constexpr std::array<ClaimClass, 3> kAllClasses = {ClaimClass::Supports, ClaimClass::Refutes,
                                                           ClaimClass::NotInfo};

/// "supports" / "refutes" / "not-info".
std::string_view to_string(ClaimClass c) noexcept;
/// Inverse of to_string; throws ConfigError on anything else.
ClaimClass parse_claim_class(std::string_view text);

/// Judge category: C0 contradicted, C1 supported, C2 unverifiable, always
/// relative to the source sentences.
enum class Category { C0, C1, C2 };

std::string_view to_string(Category c) noexcept;

/// The category a generated claim must carry to match its target class.
constexpr Category expected_category(ClaimClass c) noexcept {
  switch (c) {
    case ClaimClass::Supports: return Category::C1;
    case ClaimClass::Refutes: return Category::C0;
    case ClaimClass::NotInfo: return Category::C2;
  }
  return Category::C2;
}

struct GenerationJudgment {
  std::string claim;
  int self_contained = 1;
  Category category = Category::C2;
  int supported_score = 1;
  std::string factual;
  int objective = 1;
  int overall_quality = 1;

  /// FACTUAL is free text; it counts as factual when it mentions any of the
  /// rubric terms.
  bool is_factual() const;

  bool operator==(const GenerationJudgment&) const = default;
};

/// Declaration order is also the tie-break order for argmax.
enum class NliLabel { Entailment, Neutral, Contradiction };

inline constexpr std::array<NliLabel, 3> kAllNliLabels = {NliLabel::Entailment, NliLabel::Neutral,
                                                          NliLabel::Contradiction};

std::string_view to_string(NliLabel l) noexcept;
/// Throws ProtocolError on unknown labels.
NliLabel parse_nli_label(std::string_view text);

struct NliVerdict {
  NliLabel label = NliLabel::Neutral;
  std::array<double, 3> probs{};  // indexed by NliLabel

  double prob(NliLabel l) const noexcept { return probs[static_cast<std::size_t>(l)]; }
  bool operator==(const NliVerdict&) const = default;
};

/// Validates a probability triple and attaches its argmax label. Throws
/// ProtocolError when a probability is negative/non-finite or the sum is off
/// by more than 1e-6.
NliVerdict make_verdict(const std::array<double, 3>& probs);

enum class RecordStatus { Generated, PassedLlmFilter, PassedNliFilter, Rejected };

/// Where a rejected record left the pipeline.
enum class Stage { Generation, Parse, LlmFilter, NliFilter };

std::string_view to_string(RecordStatus s) noexcept;
std::string_view to_string(Stage s) noexcept;

struct Rejection {
  Stage stage = Stage::Generation;
  std::string reason;
  bool operator==(const Rejection&) const = default;
};

inline constexpr int kMaxClaimWords = 30;

struct ClaimRecord {
  std::string claim_id;
  std::string source_id;
  std::string topic;
  std::string language;
  ClaimClass target_class = ClaimClass::Supports;
  std::string source_text;
  std::optional<GenerationJudgment> judgment;
  std::optional<NliVerdict> nli_verdict;
  int word_count = 0;
  bool over_length = false;
  RecordStatus status = RecordStatus::Generated;
  std::optional<Rejection> rejection;

  void reject(Stage stage, std::string reason) {
    status = RecordStatus::Rejected;
    rejection = Rejection{stage, std::move(reason)};
  }

  /// Passed the LLM filter, whatever happened at the NLI stage.
  bool passed_llm_filter() const noexcept {
    return status == RecordStatus::PassedLlmFilter || status == RecordStatus::PassedNliFilter ||
           (status == RecordStatus::Rejected && rejection && rejection->stage == Stage::NliFilter);
  }

  bool operator==(const ClaimRecord&) const = default;
};

/// Claim id for one (source, class) generation slot.
std::string make_claim_id(std::string_view source_id, ClaimClass c);

void to_json(nlohmann::json& j, const GenerationJudgment& g);
void from_json(const nlohmann::json& j, GenerationJudgment& g);
void to_json(nlohmann::json& j, const NliVerdict& v);
void from_json(const nlohmann::json& j, NliVerdict& v);
void to_json(nlohmann::json& j, const ClaimRecord& r);
void from_json(const nlohmann::json& j, ClaimRecord& r);

}  // namespace synfact
