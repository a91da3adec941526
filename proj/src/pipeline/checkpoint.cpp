#include "synfact/pipeline/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"

namespace synfact::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStageNames[] = {"none", "sampled", "generated", "llm_filtered", "nli_filtered",
                                            "exported"};

// A torn tail line is dropped by for_each_line. Anything else unreadable
// means the file was edited by hand, which is not recoverable here.
json parse_line(std::string_view line, const fs::path& path) {
  auto j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw IntegrityError("corrupt checkpoint line in " + path.string());
  return j;
}

std::ofstream open_append(const fs::path& path) {
  // Cut a torn tail so the next append starts on a clean line.
  if (fs::exists(path) && fs::file_size(path) > 0) {
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.back() != '\n') {
      const auto keep = text.rfind('\n');
      fs::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open " + path.string() + " for appending");
  return out;
}

}  // namespace

std::string_view to_string(CheckpointStage s) noexcept { return kStageNames[static_cast<std::size_t>(s)]; }

CheckpointStage parse_checkpoint_stage(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kStageNames); ++i) {
    if (kStageNames[i] == text) return static_cast<CheckpointStage>(i);
  }
  throw IntegrityError("unknown checkpoint stage '" + std::string(text) + "'");
}

CheckpointStore::CheckpointStore(fs::path dir, std::string fingerprint, bool resume)
    : dir_(std::move(dir)), fingerprint_(std::move(fingerprint)) {
  const auto state_path = dir_ / "state.json";
  if (fs::exists(state_path)) {
    existed_ = true;
    const auto state = json::parse(read_file(state_path), nullptr, false);
    if (state.is_discarded() || !state.is_object()) throw IntegrityError("corrupt " + state_path.string());
    const auto stored = state.value("fingerprint", "");
    if (stored != fingerprint_) {
      throw ConfigError("checkpoint in " + dir_.string() + " belongs to another configuration (fingerprint " +
                        stored + ", current " + fingerprint_ + "); use a fresh output directory");
    }
    if (!resume) {
      throw ConfigError("checkpoint already exists in " + dir_.string() + "; pass --resume to continue it");
    }
    stage_ = parse_checkpoint_stage(state.value("stage", "none"));
    load();
  } else {
    fs::create_directories(dir_);
    for (const auto* name : {"generations.jsonl", "nli.jsonl", "sources.jsonl"}) fs::remove(dir_ / name);
    write_state();
  }
  generations_out_ = open_append(dir_ / "generations.jsonl");
  nli_out_ = open_append(dir_ / "nli.jsonl");
}

void CheckpointStore::load() {
  const auto gen_path = dir_ / "generations.jsonl";
  if (fs::exists(gen_path)) {
    for_each_line(gen_path, [&](std::string_view line) {
      if (line.empty()) return;
      const auto j = parse_line(line, gen_path);
      GenerationEntry e;
      e.claim_id = j.at("claim_id").get<std::string>();
      if (!j.at("reply").is_null()) e.reply = j.at("reply").get<std::string>();
      e.failure = j.value("failure", "");
      e.retries = j.value("retries", 0);
      generations_[e.claim_id] = std::move(e);
    }, true);
  }
  const auto nli_path = dir_ / "nli.jsonl";
  if (fs::exists(nli_path)) {
    for_each_line(nli_path, [&](std::string_view line) {
      if (line.empty()) return;
      const auto j = parse_line(line, nli_path);
      verdicts_[j.at("claim_id").get<std::string>()] = j.at("nli").get<NliVerdict>();
    }, true);
  }
}

void CheckpointStore::write_state() const {
  const json state = {{"fingerprint", fingerprint_}, {"stage", std::string(to_string(stage_))}};
  write_file_atomic(dir_ / "state.json", state.dump(2) + "\n");
}

void CheckpointStore::advance(CheckpointStage stage) {
  std::lock_guard lock(mu_);
  if (stage <= stage_) return;
  stage_ = stage;
  write_state();
}

void CheckpointStore::save_sources(const std::vector<wiki::KnowledgeSource>& sources) {
  std::string out;
  for (const auto& s : sources) {
    out += json(s).dump();
    out += '\n';
  }
  write_file_atomic(dir_ / "sources.jsonl", out);
}

std::optional<std::vector<wiki::KnowledgeSource>> CheckpointStore::load_sources() const {
  const auto path = dir_ / "sources.jsonl";
  if (!fs::exists(path)) return std::nullopt;
  std::vector<wiki::KnowledgeSource> out;
  for_each_line(path, [&](std::string_view line) {
    if (!line.empty()) out.push_back(parse_line(line, path).get<wiki::KnowledgeSource>());
  });
  return out;
}

void CheckpointStore::append_generation(const GenerationEntry& e) {
  std::lock_guard lock(mu_);
  const json j = {{"claim_id", e.claim_id},
                  {"reply", e.reply ? json(*e.reply) : json(nullptr)},
                  {"failure", e.failure},
                  {"retries", e.retries}};
  generations_out_ << j.dump() << '\n';
  generations_out_.flush();
  if (!generations_out_) throw Error("failed to append to generations checkpoint");
  generations_[e.claim_id] = e;
}

void CheckpointStore::append_verdict(const std::string& claim_id, const NliVerdict& verdict) {
  std::lock_guard lock(mu_);
  const json j = {{"claim_id", claim_id}, {"nli", verdict}};
  nli_out_ << j.dump() << '\n';
  nli_out_.flush();
  if (!nli_out_) throw Error("failed to append to NLI checkpoint");
  verdicts_[claim_id] = verdict;
}

}  // namespace synfact::pipeline
