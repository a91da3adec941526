// synfact-mock: local stand-ins for the chat and NLI endpoints, plus a
// synthetic dump writer, for trying the pipeline without a model.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "fixtures.hpp"
#include "synfact/mock/endpoints.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock endpoints and fixture dumps"};
  app.require_subcommand(1);

  int chat_port = 8090, nli_port = 8091, fail_first = 0;
  std::string api_key;
  std::size_t max_batch = 64;
  auto* serve = app.add_subcommand("serve", "Serve the mock chat and NLI endpoints until interrupted");
  serve->add_option("--chat-port", chat_port)->capture_default_str();
  serve->add_option("--nli-port", nli_port)->capture_default_str();
  serve->add_option("--api-key", api_key, "Require this bearer token on chat calls");
  serve->add_option("--fail-first", fail_first, "Answer 503 to this many chat calls first");
  serve->add_option("--max-batch", max_batch)->capture_default_str();

  std::string out, language = "en";
  std::size_t articles = 20;
  std::uint64_t seed = 1;
  auto* dump = app.add_subcommand("dump", "Write a synthetic MediaWiki dump (.xml, .gz or .bz2)");
  dump->add_option("out", out)->required();
  dump->add_option("--language", language)->check(CLI::IsMember({"en", "es", "de"}))->capture_default_str();
  dump->add_option("--articles", articles)->capture_default_str();
  dump->add_option("--seed", seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dump) {
      const auto summary = synfact::testing::write_dump(out, {.language = language, .articles = articles, .seed = seed});
      std::cout << out << ": " << summary.page_elements << " pages, " << summary.articles << " articles\n";
      return 0;
    }
    synfact::mock::ChatServer chat({.fail_first = fail_first, .required_key = api_key, .port = chat_port});
    synfact::mock::NliServer nli({.max_batch = max_batch, .port = nli_port});
    std::cout << "chat: " << chat.base_url() << "\nnli:  " << nli.base_url() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    chat.stop();
    nli.stop();
    std::cout << "served " << chat.requests() << " chat and " << nli.requests() << " NLI requests\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
