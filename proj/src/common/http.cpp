#include "synfact/common/http.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

#include "synfact/common/errors.hpp"

namespace synfact {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("endpoint URL needs a scheme: " + std::string(url));
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = std::string(url.substr(0, path_start));
  if (path_start != std::string_view::npos) out.prefix = std::string(url.substr(path_start));
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable_status(int status) { return status >= 500 || status == 408 || status == 429; }

}  // namespace

HttpReply send_with_retries(const HttpTarget& target, std::string_view path, std::string_view body,
                            const RetryPolicy& policy) {
  const auto url = split_url(target.base_url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::milliseconds(target.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  for (const auto& [k, v] : target.headers) headers.emplace(k, v);
  const std::string full_path = url.prefix + std::string(path);

  auto backoff = policy.initial_backoff;
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    auto res = body.empty() ? client.Get(full_path, headers)
                            : client.Post(full_path, headers, std::string(body), "application/json");
    if (res) {
      if (res->status >= 200 && res->status < 300) return HttpReply{res->status, res->body, attempt};
      if (!retryable_status(res->status)) {
        throw EndpointError("HTTP " + std::to_string(res->status) + " from " + target.base_url + full_path + ": " +
                                res->body.substr(0, 200),
                            res->status);
      }
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt >= policy.max_retries) {
      throw UnavailableError(target.base_url + full_path + " unavailable after " + std::to_string(attempt + 1) +
                                 " attempts (last: " + last_error + ")",
                             attempt + 1);
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(policy.max_backoff,
                       std::chrono::milliseconds(static_cast<long long>(backoff.count() * policy.multiplier)));
  }
}

}  // namespace synfact
