#include "synfact/mock/endpoints.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "synfact/common/errors.hpp"
#include "synfact/common/hash.hpp"
#include "synfact/metrics/tokenize.hpp"

namespace synfact::mock {

using nlohmann::json;

namespace {

constexpr std::string_view kSupportsMarker = "The claim should be supported by the evidence";
constexpr std::string_view kRefutesMarker = "Generate a single short and falsified claim";
constexpr std::string_view kNotInfoMarker = "The claim should be not verifiable";

std::string between(std::string_view text, std::string_view open, std::string_view close) {
  const auto a = text.find(open);
  if (a == std::string_view::npos) return {};
  const auto start = a + open.size();
  const auto b = text.find(close, start);
  return std::string(text.substr(start, b == std::string_view::npos ? std::string_view::npos : b - start));
}

std::string language_code(std::string_view prompt) {
  const auto name = between(prompt, "claims in ", ".");
  if (name == "Spanish") return "es";
  if (name == "German") return "de";
  return "en";
}

std::string evidence(std::string_view prompt) {
  // The template closes the quoted evidence with `". `; sources can contain
  // quotes of their own, so search for the marker that follows it.
  for (const auto open : {std::string_view("The evidence is: \""), std::string_view("The sentence is: \"")}) {
    const auto a = prompt.find(open);
    if (a == std::string_view::npos) continue;
    const auto start = a + open.size();
    for (const auto next : {std::string_view("\". Do not"), std::string_view("\". Generate")}) {
      const auto b = prompt.find(next, start);
      if (b != std::string_view::npos) return std::string(prompt.substr(start, b - start));
    }
  }
  return {};
}

std::string first_sentence(const std::string& text) {
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if ((text[i] == '.' || text[i] == '!' || text[i] == '?') && text[i + 1] == ' ') return text.substr(0, i + 1);
  }
  return text;
}

std::string limit_words(const std::string& sentence, std::size_t max_words) {
  std::size_t words = 0;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence[i] == ' ' && ++words == max_words) return sentence.substr(0, i) + ".";
  }
  return sentence;
}

std::string strip_final_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string lower_first(std::string s) {
  if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

std::string negate(const std::string& lang, const std::string& sentence) {
  const auto body = strip_final_period(sentence);
  if (lang == "es") return "No es cierto que " + lower_first(body) + ".";
  if (lang == "de") return "Es stimmt nicht, dass " + body + ".";
  return "It is not true that " + lower_first(body) + ".";
}

std::string drift(const std::string& lang, const std::string& topic) {
  if (lang == "es") return topic + " es más conocido hoy que cualquier otro tema de su campo.";
  if (lang == "de") return topic + " ist heute bekannter als jedes andere Thema seines Bereichs.";
  return topic + " is more widely known today than any other subject in its field.";
}

std::string topic_of(std::string_view prompt) { return between(prompt, "about the topic: \"", "\""); }

}  // namespace

std::optional<ClaimClass> detect_class(std::string_view prompt) {
  if (prompt.find(kSupportsMarker) != std::string_view::npos) return ClaimClass::Supports;
  if (prompt.find(kNotInfoMarker) != std::string_view::npos) return ClaimClass::NotInfo;
  if (prompt.find(kRefutesMarker) != std::string_view::npos) return ClaimClass::Refutes;
  return std::nullopt;
}

std::string canned_reply(std::string_view prompt) {
  const std::uint64_t h = fnv1a64(prompt);
  const auto cls = detect_class(prompt);
  if (!cls || h % 23 == 0) return "I am sorry, but I cannot produce a claim for this evidence.";

  const auto lang = language_code(prompt);
  const auto topic = topic_of(prompt);
  const auto lead = limit_words(first_sentence(evidence(prompt)), 24);

  std::string claim;
  std::string category;
  switch (*cls) {
    case ClaimClass::Supports:
      // One in nine supports claims drifts off the evidence while still
      // self-reporting C1; the NLI stage is what catches these.
      claim = h % 9 == 4 ? drift(lang, topic) : lead;
      category = "C1";
      break;
    case ClaimClass::Refutes:
      claim = negate(lang, lead);
      category = "C0";
      break;
    case ClaimClass::NotInfo:
      claim = drift(lang, topic);
      category = "C2";
      break;
  }
  if (h % 11 == 3) category = category == "C1" ? "C2" : "C1";  // category slip

  const int quality = 3 + static_cast<int>((h >> 8) % 3);         // 3..5
  const int self_contained = 3 + static_cast<int>((h >> 12) % 3);  // 3..5
  const int supported = *cls == ClaimClass::Supports ? 5 : 1 + static_cast<int>((h >> 16) % 2);

  nlohmann::ordered_json j;
  j["CLAIM"] = claim;
  j["SELF-CONTAINED"] = self_contained;
  j["CATEGORY"] = category;
  j["SUPPORTED BY ORIGINAL SENTENCE"] = (h >> 20) % 4 == 0 ? json(std::to_string(supported) + "/5") : json(supported);
  j["FACTUAL"] = "real";
  j["OBJECTIVE"] = 4 + static_cast<int>((h >> 24) % 2);
  j["OVERALL QUALITY"] = quality;
  const auto body = j.dump(4);
  if (h % 5 == 1) return "Here is the claim:\n```json\n" + body + "\n```";
  return body;
}

NliVerdict heuristic_verdict(std::string_view premise, std::string_view hypothesis) {
  const auto p = metrics::tokenize(premise, "und").tokens;
  const auto hyp = metrics::tokenize(hypothesis, "und").tokens;
  const std::set<std::string> pset(p.begin(), p.end());
  static const std::set<std::string> kNegations = {"not", "no", "nicht", "kein", "keine", "nunca", "never"};
  std::size_t overlap = 0;
  bool negated = false;
  for (const auto& t : hyp) {
    if (pset.count(t)) ++overlap;
    if (kNegations.count(t) && !pset.count(t)) negated = true;
  }
  const double ratio = hyp.empty() ? 0.0 : static_cast<double>(overlap) / static_cast<double>(hyp.size());
  NliLabel label = NliLabel::Neutral;
  if (negated && ratio >= 0.5) label = NliLabel::Contradiction;
  else if (ratio >= 0.75) label = NliLabel::Entailment;

  // Confidence varies with the pair but the label always stays the argmax.
  const double top = 0.6 + static_cast<double>(fnv1a64(hypothesis, fnv1a64(premise)) % 35) / 100.0;
  std::array<double, 3> probs{};
  probs.fill((1.0 - top) / 2.0);
  probs[static_cast<std::size_t>(label)] = top;
  return make_verdict(probs);
}

namespace {

void serve_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

struct Running {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<std::size_t> requests{0};

  void start(int wanted) {
    if (wanted > 0) {
      port = server.bind_to_port("127.0.0.1", wanted) ? wanted : -1;
    } else {
      port = server.bind_to_any_port("127.0.0.1");
    }
    if (port <= 0) throw Error("mock server could not bind a port");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  void stop() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

struct ChatServer::Impl : Running {
  ChatServerOptions options;
  std::atomic<int> failures_left{0};
};

ChatServer::ChatServer(ChatServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->failures_left = impl_->options.fail_first;
  auto* impl = impl_.get();
  impl->server.set_pre_routing_handler([impl](const httplib::Request& req, httplib::Response& res) {
    ++impl->requests;
    if (!impl->options.required_key.empty() &&
        req.get_header_value("Authorization") != "Bearer " + impl->options.required_key) {
      serve_json(res, 401, {{"error", {{"message", "invalid api key"}}}});
      return httplib::Server::HandlerResponse::Handled;
    }
    if (impl->options.always_status != 0) {
      serve_json(res, impl->options.always_status, {{"error", {{"message", "configured failure"}}}});
      return httplib::Server::HandlerResponse::Handled;
    }
    if (ends_with(req.path, "/chat/completions") && impl->failures_left.fetch_sub(1) > 0) {
      serve_json(res, 503, {{"error", {{"message", "temporarily unavailable"}}}});
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });
  impl->server.Get(R"(.*/models)", [](const httplib::Request&, httplib::Response& res) {
    serve_json(res, 200, {{"object", "list"}, {"data", {{{"id", "mock-chat"}, {"object", "model"}}}}});
  });
  impl->server.Post(R"(.*/chat/completions)", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages") || !body["messages"].is_array() ||
        body["messages"].empty()) {
      serve_json(res, 400, {{"error", {{"message", "messages required"}}}});
      return;
    }
    const auto prompt = body["messages"].back().value("content", "");
    serve_json(res, 200,
               {{"id", "mock-" + to_hex(fnv1a64(prompt))},
                {"object", "chat.completion"},
                {"model", body.value("model", "mock-chat")},
                {"choices",
                 {{{"index", 0},
                   {"message", {{"role", "assistant"}, {"content", canned_reply(prompt)}}},
                   {"finish_reason", "stop"}}}}});
  });
  impl->start(impl->options.port);
}

ChatServer::~ChatServer() { impl_->stop(); }
int ChatServer::port() const noexcept { return impl_->port; }
std::string ChatServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1"; }
std::size_t ChatServer::requests() const noexcept { return impl_->requests; }
void ChatServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}
void ChatServer::stop() { impl_->stop(); }

struct NliServer::Impl : Running {
  NliServerOptions options;
};

NliServer::NliServer(NliServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto* impl = impl_.get();
  impl->server.Get("/v1/health", [impl](const httplib::Request&, httplib::Response& res) {
    ++impl->requests;
    serve_json(res, 200, {{"status", "ok"}, {"model", impl->options.model}});
  });
  impl->server.Get("/v1/info", [impl](const httplib::Request&, httplib::Response& res) {
    serve_json(res, 200, {{"model", impl->options.model}, {"max_batch", impl->options.max_batch},
                          {"max_length", 512}});
  });
  impl->server.Post("/v1/nli", [impl](const httplib::Request& req, httplib::Response& res) {
    ++impl->requests;
    const auto body = json::parse(req.body, nullptr, false);
    std::vector<filtering::wire::Pair> pairs;
    try {
      if (body.is_discarded()) throw ProtocolError("invalid JSON");
      if (body.contains("pairs") && (body.contains("premise") || body.contains("hypothesis"))) {
        throw ProtocolError("use either premise/hypothesis or pairs, not both");
      }
      pairs = filtering::wire::parse_request(body);
    } catch (const ProtocolError& e) {
      serve_json(res, 400, {{"error", e.what()}});
      return;
    }
    if (pairs.size() > impl->options.max_batch) {
      serve_json(res, 413, {{"error", "batch exceeds " + std::to_string(impl->options.max_batch)}});
      return;
    }
    std::vector<NliVerdict> verdicts;
    for (const auto& [p, h] : pairs) {
      if (p.empty() || h.empty()) {
        serve_json(res, 400, {{"error", "empty premise or hypothesis"}});
        return;
      }
      verdicts.push_back(heuristic_verdict(p, h));
    }
    auto out = filtering::wire::response(verdicts);
    for (auto& r : out["results"]) {
      if (impl->options.mislabel) {
        r["label"] = r["label"] == "neutral" ? "entailment" : "neutral";
      }
      if (impl->options.bad_sum) r["probs"]["neutral"] = r["probs"]["neutral"].get<double>() + 0.25;
    }
    serve_json(res, 200, out);
  });
  impl->start(impl->options.port);
}

NliServer::~NliServer() { impl_->stop(); }
int NliServer::port() const noexcept { return impl_->port; }
std::string NliServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }
std::size_t NliServer::requests() const noexcept { return impl_->requests; }
void NliServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}
void NliServer::stop() { impl_->stop(); }

}  // namespace synfact::mock
