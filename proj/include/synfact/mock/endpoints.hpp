#pragma once

// Deterministic stand-ins for the chat model and the NLI service, for tests
// and offline runs.

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synfact/filtering/nli_client.hpp"
#include "synfact/records.hpp"

namespace synfact::mock {

/// Target class of a generation prompt, recognised from template wording.
std::optional<ClaimClass> detect_class(std::string_view prompt);

/// Canned model reply for a prompt: a pure function of the prompt text.
///
/// Supports claims restate the first evidence sentence, refutes claims negate
/// it and not-info claims drift to a comparison the evidence cannot settle.
/// The prompt hash also decides the self-assessed scores, occasional category
/// slips, drifting supports claims, code-fenced replies and unparseable ones,
/// so every filter branch is exercised.
std::string canned_reply(std::string_view prompt);

/// Heuristic NLI: contradiction when the hypothesis negates a premise it
/// mostly overlaps, entailment on high overlap, neutral otherwise.
NliVerdict heuristic_verdict(std::string_view premise, std::string_view hypothesis);

struct ChatServerOptions {
  int fail_first = 0;          // answer 503 to this many requests first
  int always_status = 0;       // when nonzero, answer every request with it
  std::string required_key;    // when set, other bearer tokens get 401
  int port = 0;                // 0 picks a free port
};

/// OpenAI-compatible chat server on 127.0.0.1 serving POST
/// <prefix>/chat/completions and GET <prefix>/models for any prefix.
class ChatServer {
 public:
  explicit ChatServer(ChatServerOptions options = {});
  ~ChatServer();
  ChatServer(const ChatServer&) = delete;
  ChatServer& operator=(const ChatServer&) = delete;

  int port() const noexcept;
  std::string base_url() const;  // http://127.0.0.1:<port>/v1
  std::size_t requests() const noexcept;

  /// Blocks until stop() is called from another thread or a signal.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NliServerOptions {
  std::size_t max_batch = 64;
  std::string model = "mock-nli";
  bool mislabel = false;  // report a label that is not the argmax
  bool bad_sum = false;   // report probabilities that do not sum to 1
  int port = 0;
};

/// NLI service implementing the filtering wire protocol with heuristic_verdict.
class NliServer {
 public:
  explicit NliServer(NliServerOptions options = {});
  ~NliServer();
  NliServer(const NliServer&) = delete;
  NliServer& operator=(const NliServer&) = delete;

  int port() const noexcept;
  std::string base_url() const;  // http://127.0.0.1:<port>
  std::size_t requests() const noexcept;

  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace synfact::mock
