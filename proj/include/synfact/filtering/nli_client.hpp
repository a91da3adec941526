#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "synfact/common/http.hpp"
#include "synfact/records.hpp"

namespace synfact::filtering {

/// Wire format of the NLI service.
///
///   POST /v1/nli   {"premise": p, "hypothesis": h}
///               or {"pairs": [[p, h], ...]}
///   -> {"results": [{"label": "entailment"|"neutral"|"contradiction",
///                    "probs": {"entailment": x, "neutral": y, "contradiction": z}}]}
///   GET /v1/health -> {"status": "ok", "model": id}
namespace wire {

using Pair = std::pair<std::string, std::string>;  // premise, hypothesis

nlohmann::json request(const std::vector<Pair>& pairs);

/// Parses a request body in either shape. Throws ProtocolError.
std::vector<Pair> parse_request(const nlohmann::json& body);

nlohmann::json response(const std::vector<NliVerdict>& verdicts);

/// Parses and validates a response carrying `expected` results: known
/// labels, probabilities summing to 1 within 1e-6, and a label whose
/// probability is the maximum. The returned label is the argmax. Throws
/// ProtocolError.
std::vector<NliVerdict> parse_response(std::string_view body, std::size_t expected);

}  // namespace wire

struct NliEndpoint {
  std::string base_url;  // e.g. http://localhost:8081
  int timeout_ms = 60000;
  std::size_t batch_size = 16;
  RetryPolicy retry;
};

struct HealthInfo {
  std::string status;
  std::string model;
};

class NliClient {
 public:
  explicit NliClient(NliEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  HealthInfo health() const;

  /// Classifies pairs in order, batch_size pairs per request.
  std::vector<NliVerdict> classify(const std::vector<wire::Pair>& pairs) const;

  NliVerdict classify(std::string_view premise, std::string_view hypothesis) const;

  const NliEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  NliEndpoint endpoint_;
};

}  // namespace synfact::filtering
