#include "synfact/claimgen/generator.hpp"

#include <algorithm>
#include <mutex>

#include "synfact/claimgen/judgment.hpp"
#include "synfact/common/errors.hpp"
#include "synfact/common/parallel.hpp"
#include "synfact/metrics/tokenize.hpp"

namespace synfact::claimgen {

namespace {

ClaimRecord base_record(const wiki::KnowledgeSource& source, ClaimClass cls) {
  ClaimRecord r;
  r.claim_id = make_claim_id(source.source_id, cls);
  r.source_id = source.source_id;
  r.topic = source.topic;
  r.language = source.language;
  r.target_class = cls;
  r.source_text = source.evidence();
  return r;
}

bool is_auth_failure(int status) { return status == 401 || status == 403; }

}  // namespace

ClaimRecord record_from_reply(const wiki::KnowledgeSource& source, ClaimClass cls, std::string_view reply,
                              const GenerationOptions& options) {
  ClaimRecord r = base_record(source, cls);
  try {
    r.judgment = parse_generation(reply);
  } catch (const ParseFailure&) {
    r.reject(Stage::Parse, "unparseable");
    return r;
  }
  r.word_count = metrics::count_words(r.judgment->claim, r.language);
  r.over_length = r.word_count >= kMaxClaimWords;
  r.status = RecordStatus::Generated;
  if (r.over_length && options.drop_over_length) r.reject(Stage::Generation, "over_length");
  return r;
}

ClaimRecord failed_record(const wiki::KnowledgeSource& source, ClaimClass cls, std::string reason) {
  ClaimRecord r = base_record(source, cls);
  r.reject(Stage::Generation, std::move(reason));
  return r;
}

std::string prompt_for(const PromptSet& prompts, const wiki::KnowledgeSource& source, ClaimClass cls,
                       const GenerationOptions& options) {
  return prompts.build(cls, language_name(source.language, options.language_names), source.topic,
                       source.evidence());
}

namespace {

GenerationEvent run_slot(const wiki::KnowledgeSource& source, std::size_t index, ClaimClass cls,
                         const PromptSet& prompts, const ChatFn& chat, const GenerationOptions& options) {
  GenerationEvent ev;
  ev.source_index = index;
  ev.cls = cls;
  const auto prompt = prompt_for(prompts, source, cls, options);
  try {
    auto resp = chat(prompt);
    ev.retries = resp.retries;
    ev.record = record_from_reply(source, cls, resp.content, options);
    ev.reply = std::move(resp.content);
  } catch (const EndpointError& e) {
    if (is_auth_failure(e.status())) throw;
    ev.record = failed_record(source, cls, "endpoint_error");
  } catch (const UnavailableError& e) {
    ev.retries = std::max(0, e.attempts() - 1);
    ev.record = failed_record(source, cls, "unavailable");
  } catch (const ProtocolError&) {
    ev.record = failed_record(source, cls, "endpoint_error");
  }
  return ev;
}

}  // namespace

std::vector<ClaimRecord> generate_claims_for_source(const wiki::KnowledgeSource& source, const PromptSet& prompts,
                                                    const ChatFn& chat, const GenerationOptions& options) {
  std::vector<ClaimRecord> out;
  out.reserve(kAllClasses.size());
  for (const auto cls : kAllClasses) out.push_back(run_slot(source, 0, cls, prompts, chat, options).record);
  return out;
}

void generate_all(const std::vector<wiki::KnowledgeSource>& sources, const PromptSet& prompts, const ChatFn& chat,
                  const GenerationOptions& options, const std::function<bool(std::size_t, ClaimClass)>& skip,
                  const std::function<void(GenerationEvent&&)>& on_event) {
  std::vector<std::pair<std::size_t, ClaimClass>> slots;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (const auto cls : kAllClasses) {
      if (!skip || !skip(i, cls)) slots.emplace_back(i, cls);
    }
  }
  std::mutex mu;
  parallel_for(slots.size(), options.concurrency, [&](std::size_t k) {
    const auto [i, cls] = slots[k];
    auto ev = run_slot(sources[i], i, cls, prompts, chat, options);
    std::lock_guard lock(mu);
    on_event(std::move(ev));
  });
}

}  // namespace synfact::claimgen
