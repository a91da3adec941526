#pragma once

#include <string>
#include <string_view>

#include "synfact/common/http.hpp"

namespace synfact::claimgen {

/// OpenAI-compatible chat-completions endpoint.
struct ChatEndpoint {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;   // sent as a Bearer token when non-empty
  std::string model = "mistralai/Mistral-7B-Instruct-v0.3";
  double temperature = 0.7;
  int max_tokens = 512;
  int timeout_ms = 120000;
  RetryPolicy retry;
};

struct ChatResponse {
  std::string content;
  int retries = 0;
};

/// One single-turn chat completion; returns choices[0].message.content.
/// Throws EndpointError (non-retryable 4xx), UnavailableError (retries
/// exhausted) or ProtocolError (response without message content).
ChatResponse request_generation(std::string_view prompt, const ChatEndpoint& endpoint);

/// Request body for one prompt; exposed for tests and mock servers.
std::string chat_request_body(std::string_view prompt, const ChatEndpoint& endpoint);

}  // namespace synfact::claimgen
