#include "synfact/records.hpp"

#include <cmath>

#include "synfact/common/errors.hpp"
#include "synfact/common/unicode.hpp"

namespace synfact {

using nlohmann::json;

std::string_view to_string(ClaimClass c) noexcept {
  switch (c) {
    case ClaimClass::Supports: return "supports";
    case ClaimClass::Refutes: return "refutes";
    case ClaimClass::NotInfo: return "not-info";
  }
  return "not-info";
}

ClaimClass parse_claim_class(std::string_view text) {
  for (auto c : kAllClasses) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown claim class '" + std::string(text) + "'");
}

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::C0: return "C0";
    case Category::C1: return "C1";
    case Category::C2: return "C2";
  }
  return "C2";
}

namespace {
Category parse_category_exact(std::string_view text) {
  if (text == "C0") return Category::C0;
  if (text == "C1") return Category::C1;
  if (text == "C2") return Category::C2;
  throw ParseFailure("unknown category '" + std::string(text) + "'");
}
}  // namespace

bool GenerationJudgment::is_factual() const {
  const auto lowered = unicode::to_lower(factual);
  return lowered.find("real") != std::string::npos || lowered.find("non-fiction") != std::string::npos ||
         lowered.find("non-fantastic") != std::string::npos;
}

std::string_view to_string(NliLabel l) noexcept {
  switch (l) {
    case NliLabel::Entailment: return "entailment";
    case NliLabel::Neutral: return "neutral";
    case NliLabel::Contradiction: return "contradiction";
  }
  return "neutral";
}

NliLabel parse_nli_label(std::string_view text) {
  for (auto l : kAllNliLabels) {
    if (to_string(l) == text) return l;
  }
  throw ProtocolError("unknown NLI label '" + std::string(text) + "'");
}

NliVerdict make_verdict(const std::array<double, 3>& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw ProtocolError("NLI probability out of range");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-6) {
    throw ProtocolError("NLI probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  NliVerdict v;
  v.probs = probs;
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  v.label = kAllNliLabels[best];
  return v;
}

std::string_view to_string(RecordStatus s) noexcept {
  switch (s) {
    case RecordStatus::Generated: return "generated";
    case RecordStatus::PassedLlmFilter: return "passed_llm_filter";
    case RecordStatus::PassedNliFilter: return "passed_nli_filter";
    case RecordStatus::Rejected: return "rejected";
  }
  return "rejected";
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Generation: return "generation";
    case Stage::Parse: return "parse";
    case Stage::LlmFilter: return "llm_filter";
    case Stage::NliFilter: return "nli_filter";
  }
  return "generation";
}

namespace {
RecordStatus parse_status(std::string_view text) {
  for (auto s : {RecordStatus::Generated, RecordStatus::PassedLlmFilter, RecordStatus::PassedNliFilter,
                 RecordStatus::Rejected}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown record status '" + std::string(text) + "'");
}

Stage parse_stage(std::string_view text) {
  for (auto s : {Stage::Generation, Stage::Parse, Stage::LlmFilter, Stage::NliFilter}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown stage '" + std::string(text) + "'");
}
}  // namespace

std::string make_claim_id(std::string_view source_id, ClaimClass c) {
  std::string id(source_id);
  id += '/';
  id += to_string(c);
  return id;
}

void to_json(json& j, const GenerationJudgment& g) {
  j = json{{"claim", g.claim},
           {"self_contained", g.self_contained},
           {"category", to_string(g.category)},
           {"supported", g.supported_score},
           {"factual", g.factual},
           {"objective", g.objective},
           {"overall_quality", g.overall_quality}};
}

void from_json(const json& j, GenerationJudgment& g) {
  g.claim = j.at("claim").get<std::string>();
  g.self_contained = j.at("self_contained").get<int>();
  g.category = parse_category_exact(j.at("category").get<std::string>());
  g.supported_score = j.at("supported").get<int>();
  g.factual = j.at("factual").get<std::string>();
  g.objective = j.at("objective").get<int>();
  g.overall_quality = j.at("overall_quality").get<int>();
}

void to_json(json& j, const NliVerdict& v) {
  json probs = json::object();
  for (auto l : kAllNliLabels) probs[std::string(to_string(l))] = v.prob(l);
  j = json{{"label", to_string(v.label)}, {"probs", probs}};
}

void from_json(const json& j, NliVerdict& v) {
  std::array<double, 3> probs{};
  for (auto l : kAllNliLabels) probs[static_cast<std::size_t>(l)] = j.at("probs").at(std::string(to_string(l))).get<double>();
  v.probs = probs;
  v.label = parse_nli_label(j.at("label").get<std::string>());
}

void to_json(json& j, const ClaimRecord& r) {
  j = json{{"claim_id", r.claim_id},
           {"source_id", r.source_id},
           {"topic", r.topic},
           {"language", r.language},
           {"label", to_string(r.target_class)},
           {"source", r.source_text},
           {"claim", r.judgment ? r.judgment->claim : std::string()},
           {"judgment", r.judgment ? json(*r.judgment) : json(nullptr)},
           {"nli", r.nli_verdict ? json(*r.nli_verdict) : json(nullptr)},
           {"word_count", r.word_count},
           {"over_length", r.over_length},
           {"status", to_string(r.status)},
           {"rejection", r.rejection ? json{{"stage", to_string(r.rejection->stage)}, {"reason", r.rejection->reason}}
                                     : json(nullptr)}};
}

void from_json(const json& j, ClaimRecord& r) {
  r.claim_id = j.at("claim_id").get<std::string>();
  r.source_id = j.at("source_id").get<std::string>();
  r.topic = j.at("topic").get<std::string>();
  r.language = j.at("language").get<std::string>();
  r.target_class = parse_claim_class(j.at("label").get<std::string>());
  r.source_text = j.at("source").get<std::string>();
  r.judgment.reset();
  if (!j.at("judgment").is_null()) r.judgment = j.at("judgment").get<GenerationJudgment>();
  r.nli_verdict.reset();
  if (!j.at("nli").is_null()) r.nli_verdict = j.at("nli").get<NliVerdict>();
  r.word_count = j.at("word_count").get<int>();
  r.over_length = j.at("over_length").get<bool>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.rejection.reset();
  if (!j.at("rejection").is_null()) {
    const auto& rj = j.at("rejection");
    r.rejection = Rejection{parse_stage(rj.at("stage").get<std::string>()), rj.at("reason").get<std::string>()};
  }
}

}  // namespace synfact
