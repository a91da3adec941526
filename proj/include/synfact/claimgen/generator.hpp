#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synfact/claimgen/chat.hpp"
#include "synfact/claimgen/prompts.hpp"
#include "synfact/records.hpp"
#include "synfact/wikisource/types.hpp"

namespace synfact::claimgen {

struct GenerationOptions {
  bool drop_over_length = false;  // flag-only by default
  std::size_t concurrency = 8;    // in-flight chat requests
  std::map<std::string, std::string> language_names;
};

/// Turns one model reply into a record for (source, class). Pure.
///
/// A reply that fails to parse gives a Rejected record with reason
/// "unparseable"; otherwise the record is Generated, with word_count from the
/// metrics tokenizer and over_length set at 30 words or more.
ClaimRecord record_from_reply(const wiki::KnowledgeSource& source, ClaimClass cls, std::string_view reply,
                              const GenerationOptions& options = {});

/// Record for a slot whose chat call never produced a reply.
ClaimRecord failed_record(const wiki::KnowledgeSource& source, ClaimClass cls, std::string reason);

/// The prompt issued for (source, class).
std::string prompt_for(const PromptSet& prompts, const wiki::KnowledgeSource& source, ClaimClass cls,
                       const GenerationOptions& options = {});

/// Signature of the chat transport; request_generation in production.
using ChatFn = std::function<ChatResponse(std::string_view prompt)>;

/// Issues the three per-class calls for one source, in class order.
///
/// Unavailable endpoints and non-auth 4xx answers become Rejected records
/// ("unavailable" / "endpoint_error"); 401/403 propagate since every other
/// call would fail the same way.
std::vector<ClaimRecord> generate_claims_for_source(const wiki::KnowledgeSource& source, const PromptSet& prompts,
                                                    const ChatFn& chat, const GenerationOptions& options = {});

/// One chat call's outcome, reported as soon as it completes.
struct GenerationEvent {
  std::size_t source_index = 0;
  ClaimClass cls = ClaimClass::Supports;
  ClaimRecord record;
  std::optional<std::string> reply;  // set when the model answered
  int retries = 0;
};

/// Fans out every (source, class) slot over `options.concurrency` workers.
/// `skip(source_index, cls)` lets callers skip slots already done;
/// `on_event` is called from worker threads, serialized by an internal lock.
void generate_all(const std::vector<wiki::KnowledgeSource>& sources, const PromptSet& prompts, const ChatFn& chat,
                  const GenerationOptions& options, const std::function<bool(std::size_t, ClaimClass)>& skip,
                  const std::function<void(GenerationEvent&&)>& on_event);

}  // namespace synfact::claimgen
