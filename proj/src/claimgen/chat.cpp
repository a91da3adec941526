#include "synfact/claimgen/chat.hpp"

#include <json.hpp>

#include "synfact/common/errors.hpp"

namespace synfact::claimgen {

using nlohmann::json;

std::string chat_request_body(std::string_view prompt, const ChatEndpoint& endpoint) {
  json body = {{"model", endpoint.model},
               {"messages", json::array({json{{"role", "user"}, {"content", std::string(prompt)}}})},
               {"temperature", endpoint.temperature},
               {"max_tokens", endpoint.max_tokens}};
  return body.dump();
}

ChatResponse request_generation(std::string_view prompt, const ChatEndpoint& endpoint) {
  HttpTarget target{endpoint.base_url, endpoint.timeout_ms, {}};
  if (!endpoint.api_key.empty()) target.headers.emplace_back("Authorization", "Bearer " + endpoint.api_key);
  const auto reply = send_with_retries(target, "/chat/completions", chat_request_body(prompt, endpoint), endpoint.retry);

  const auto parsed = json::parse(reply.body, nullptr, false);
  if (parsed.is_discarded()) throw ProtocolError("chat endpoint returned non-JSON body");
  try {
    const auto& content = parsed.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProtocolError("chat response content is not a string");
    return ChatResponse{content.get<std::string>(), reply.retries};
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("chat response missing choices[0].message.content: ") + e.what());
  }
}

}  // namespace synfact::claimgen
