#pragma once

#include <string>
#include <vector>

#include "synfact/records.hpp"

namespace synfact::filtering {

/// Threshold for SELF-CONTAINED and OVERALL QUALITY; scores must exceed it.
inline constexpr int kMinScoreExclusive = 3;

struct FilterDecision {
  bool keep = false;
  std::string reason;  // empty when kept

  bool operator==(const FilterDecision&) const = default;
};

/// Keeps a claim whose judged category matches its target class and whose
/// self-containedness and overall quality both exceed 3.
FilterDecision llm_filter(const GenerationJudgment& judgment, ClaimClass target);

/// entailment -> supports, contradiction -> refutes, neutral -> not-info.
ClaimClass map_nli_label(NliLabel label) noexcept;

/// Keeps a claim whose NLI verdict maps to its target class.
FilterDecision nli_filter(const NliVerdict& verdict, ClaimClass target);

/// Applies llm_filter to every Generated record in place; records in any
/// other state are left alone.
void apply_llm_filter(std::vector<ClaimRecord>& records);

/// Applies a verdict to a record that passed the LLM filter.
void apply_nli_verdict(ClaimRecord& record, const NliVerdict& verdict);

}  // namespace synfact::filtering
