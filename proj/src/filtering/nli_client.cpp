#include "synfact/filtering/nli_client.hpp"

#include <algorithm>

#include "synfact/common/errors.hpp"

namespace synfact::filtering {

using nlohmann::json;

namespace wire {

json request(const std::vector<Pair>& pairs) {
  if (pairs.size() == 1) return {{"premise", pairs[0].first}, {"hypothesis", pairs[0].second}};
  json arr = json::array();
  for (const auto& [p, h] : pairs) arr.push_back({p, h});
  return {{"pairs", std::move(arr)}};
}

std::vector<Pair> parse_request(const json& body) {
  std::vector<Pair> out;
  if (!body.is_object()) throw ProtocolError("NLI request is not an object");
  if (body.contains("pairs")) {
    const auto& arr = body["pairs"];
    if (!arr.is_array()) throw ProtocolError("'pairs' is not an array");
    for (const auto& item : arr) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
        throw ProtocolError("each pair must be [premise, hypothesis]");
      }
      out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
    }
    return out;
  }
  if (!body.contains("premise") || !body.contains("hypothesis") || !body["premise"].is_string() ||
      !body["hypothesis"].is_string()) {
    throw ProtocolError("NLI request needs 'premise' and 'hypothesis'");
  }
  out.emplace_back(body["premise"].get<std::string>(), body["hypothesis"].get<std::string>());
  return out;
}

json response(const std::vector<NliVerdict>& verdicts) {
  json results = json::array();
  for (const auto& v : verdicts) results.push_back(v);
  return {{"results", std::move(results)}};
}

std::vector<NliVerdict> parse_response(std::string_view body, std::size_t expected) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("NLI response is not a JSON object");
  const auto it = j.find("results");
  if (it == j.end() || !it->is_array()) throw ProtocolError("NLI response has no 'results' array");
  if (it->size() != expected) {
    throw ProtocolError("NLI response has " + std::to_string(it->size()) + " results, expected " +
                        std::to_string(expected));
  }
  std::vector<NliVerdict> out;
  out.reserve(expected);
  for (const auto& item : *it) {
    if (!item.is_object() || !item.contains("label") || !item["label"].is_string() || !item.contains("probs") ||
        !item["probs"].is_object()) {
      throw ProtocolError("NLI result needs 'label' and 'probs'");
    }
    const NliLabel claimed = parse_nli_label(item["label"].get<std::string>());
    std::array<double, 3> probs{};
    for (const auto l : kAllNliLabels) {
      const auto p = item["probs"].find(std::string(to_string(l)));
      if (p == item["probs"].end() || !p->is_number()) {
        throw ProtocolError("NLI result lacks probability for " + std::string(to_string(l)));
      }
      probs[static_cast<std::size_t>(l)] = p->get<double>();
    }
    const auto verdict = make_verdict(probs);
    if (verdict.prob(claimed) < verdict.prob(verdict.label)) {
      throw ProtocolError("NLI label '" + std::string(to_string(claimed)) + "' is not the most probable");
    }
    out.push_back(verdict);
  }
  return out;
}

}  // namespace wire

HealthInfo NliClient::health() const {
  const HttpTarget target{endpoint_.base_url, endpoint_.timeout_ms, {}};
  const auto reply = send_with_retries(target, "/v1/health", "", endpoint_.retry);
  const auto j = json::parse(reply.body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("status")) throw ProtocolError("bad health response");
  return {j.value("status", ""), j.value("model", "")};
}

std::vector<NliVerdict> NliClient::classify(const std::vector<wire::Pair>& pairs) const {
  const HttpTarget target{endpoint_.base_url, endpoint_.timeout_ms, {}};
  const std::size_t batch = std::max<std::size_t>(1, endpoint_.batch_size);
  std::vector<NliVerdict> out;
  out.reserve(pairs.size());
  for (std::size_t start = 0; start < pairs.size(); start += batch) {
    const std::vector<wire::Pair> chunk(pairs.begin() + start,
                                        pairs.begin() + std::min(pairs.size(), start + batch));
    const auto reply = send_with_retries(target, "/v1/nli", wire::request(chunk).dump(), endpoint_.retry);
    auto verdicts = wire::parse_response(reply.body, chunk.size());
    out.insert(out.end(), verdicts.begin(), verdicts.end());
  }
  return out;
}

NliVerdict NliClient::classify(std::string_view premise, std::string_view hypothesis) const {
  return classify(std::vector<wire::Pair>{{std::string(premise), std::string(hypothesis)}}).front();
}

}  // namespace synfact::filtering
