#include "synfact/filtering/filters.hpp"

#include "synfact/common/errors.hpp"

namespace synfact::filtering {

FilterDecision llm_filter(const GenerationJudgment& judgment, ClaimClass target) {
  if (judgment.category != expected_category(target)) return {false, "category_mismatch"};
  if (judgment.self_contained <= kMinScoreExclusive) return {false, "not_self_contained"};
  if (judgment.overall_quality <= kMinScoreExclusive) return {false, "low_quality"};
  return {true, {}};
}

ClaimClass map_nli_label(NliLabel label) noexcept {
  switch (label) {
    case NliLabel::Entailment: return ClaimClass::Supports;
    case NliLabel::Contradiction: return ClaimClass::Refutes;
    case NliLabel::Neutral: return ClaimClass::NotInfo;
  }
  return ClaimClass::NotInfo;
}

FilterDecision nli_filter(const NliVerdict& verdict, ClaimClass target) {
  if (map_nli_label(verdict.label) != target) return {false, "nli_" + std::string(to_string(verdict.label))};
  return {true, {}};
}

void apply_llm_filter(std::vector<ClaimRecord>& records) {
  for (auto& r : records) {
    if (r.status != RecordStatus::Generated || !r.judgment) continue;
    const auto d = llm_filter(*r.judgment, r.target_class);
    if (d.keep) r.status = RecordStatus::PassedLlmFilter;
    else r.reject(Stage::LlmFilter, d.reason);
  }
}

void apply_nli_verdict(ClaimRecord& record, const NliVerdict& verdict) {
  if (record.status != RecordStatus::PassedLlmFilter) {
    throw IntegrityError("NLI verdict for " + record.claim_id + " which has not passed the LLM filter");
  }
  record.nli_verdict = verdict;
  const auto d = nli_filter(verdict, record.target_class);
  if (d.keep) record.status = RecordStatus::PassedNliFilter;
  else record.reject(Stage::NliFilter, d.reason);
}

}  // namespace synfact::filtering
