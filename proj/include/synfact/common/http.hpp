#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synfact {

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};
};

struct HttpTarget {
  std::string base_url;  // scheme://host[:port][/prefix]
  int timeout_ms = 60000;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpReply {
  int status = 0;
  std::string body;
  int retries = 0;  // attempts beyond the first
};

/// Sends one request, retrying connection failures, 5xx, 408 and 429 with
/// exponential backoff. Other 4xx raise EndpointError immediately; running out
/// of retries raises UnavailableError. `path` is appended to the base URL's
/// path prefix. An empty `body` means GET, otherwise POST with a JSON body.
HttpReply send_with_retries(const HttpTarget& target, std::string_view path, std::string_view body,
                            const RetryPolicy& policy);

}  // namespace synfact
