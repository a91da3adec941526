#include "synfact/pipeline/pipeline.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "synfact/common/files.hpp"
#include "synfact/common/parallel.hpp"
#include "synfact/common/rng.hpp"
#include "synfact/filtering/filters.hpp"
#include "synfact/wikisource/dump_reader.hpp"
#include "synfact/wikisource/knowledge.hpp"

namespace synfact::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string drop_key(const Rejection& r) { return std::string(to_string(r.stage)) + "/" + r.reason; }

}  // namespace

EntrySample sample_entries(const fs::path& dump, const std::string& language, std::size_t k, std::uint64_t seed) {
  EntrySample out;
  {
    wiki::PageStream count_pass(dump, language);
    while (count_pass.next()) ++out.eligible_pages;
  }
  Rng rng(derive_seed(seed, "entries/" + language));
  const auto chosen = rng.sample_indices(out.eligible_pages, std::min<std::uint64_t>(k, out.eligible_pages));
  wiki::PageStream pass(dump, language);
  std::uint64_t index = 0;
  for (const auto want : chosen) {
    std::optional<wiki::RawPage> page;
    while ((page = pass.next()) && index++ < want) {
    }
    if (!page) throw IntegrityError("dump " + dump.string() + " changed between sampling passes");
    out.pages.push_back(std::move(*page));
  }
  return out;
}

json to_json(const RunReport& r) {
  return {{"fingerprint", r.fingerprint},
          {"stage", r.stage},
          {"eligible_pages", r.eligible_pages},
          {"sampled_entries", r.sampled_entries},
          {"sources", r.sources},
          {"generation_slots", r.generation_slots},
          {"status_counts", r.status_counts},
          {"drop_reasons", r.drop_reasons},
          {"over_length", r.over_length},
          {"cost",
           {{"chat_calls", r.chat_calls},
            {"chat_calls_reused", r.chat_calls_reused},
            {"chat_retries", r.chat_retries},
            {"nli_requests", r.nli_requests},
            {"nli_pairs", r.nli_pairs},
            {"nli_pairs_reused", r.nli_pairs_reused}}},
          {"stage_seconds", r.stage_seconds},
          {"exported", r.exported},
          {"distribution", to_json(r.distribution)}};
}

void check_conservation(const std::vector<ClaimRecord>& records, bool nli_enabled) {
  struct Cell {
    std::size_t total = 0, parse = 0, generation = 0, llm = 0, nli_dropped = 0, kept_llm = 0, kept_nli = 0;
  };
  std::map<std::pair<std::string, ClaimClass>, Cell> cells;
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.claim_id).second) throw IntegrityError("claim " + r.claim_id + " appears twice");
    auto& c = cells[{r.language, r.target_class}];
    ++c.total;
    switch (r.status) {
      case RecordStatus::Generated:
        throw IntegrityError("claim " + r.claim_id + " was never filtered");
      case RecordStatus::PassedLlmFilter:
        if (nli_enabled) throw IntegrityError("claim " + r.claim_id + " skipped the NLI filter");
        ++c.kept_llm;
        break;
      case RecordStatus::PassedNliFilter:
        if (!nli_enabled) throw IntegrityError("claim " + r.claim_id + " has an NLI pass with NLI disabled");
        ++c.kept_nli;
        break;
      case RecordStatus::Rejected:
        if (!r.rejection) throw IntegrityError("claim " + r.claim_id + " rejected without a reason");
        switch (r.rejection->stage) {
          case Stage::Generation: ++c.generation; break;
          case Stage::Parse: ++c.parse; break;
          case Stage::LlmFilter: ++c.llm; break;
          case Stage::NliFilter: ++c.nli_dropped; break;
        }
        break;
    }
  }
  for (const auto& [key, c] : cells) {
    const auto sum = c.parse + c.generation + c.llm + c.nli_dropped + c.kept_llm + c.kept_nli;
    if (sum != c.total) {
      throw IntegrityError("conservation violated for " + key.first + "/" + std::string(to_string(key.second)));
    }
    const std::size_t no_mnli = c.kept_llm + c.kept_nli + c.nli_dropped;
    if (c.kept_nli > no_mnli) throw IntegrityError("mnli_filtering is not a subset of no_mnli_filtering");
  }
}

Pipeline::Pipeline(PipelineConfig config, bool resume, RunHooks hooks)
    : config_(std::move(config)), hooks_(std::move(hooks)) {
  config_.validate();
  report_.fingerprint = config_.fingerprint();
  store_ = std::make_unique<CheckpointStore>(config_.output_dir / "checkpoint", report_.fingerprint, resume);
  report_.stage = std::string(to_string(store_->stage()));
}

Pipeline::~Pipeline() = default;

void Pipeline::count_model_call() {
  const auto n = ++model_calls_;
  if (hooks_.max_model_calls && n > *hooks_.max_model_calls) {
    throw Interrupted("stopped after " + std::to_string(*hooks_.max_model_calls) + " model calls");
  }
}

claimgen::PromptSet Pipeline::prompts() const {
  auto set = config_.prompt_dir ? claimgen::PromptSet::load(*config_.prompt_dir, config_.prompt_version)
                                : claimgen::PromptSet::builtin();
  if (!config_.prompt_dir && config_.prompt_version != set.version()) {
    throw ConfigError("prompt version " + config_.prompt_version + " is not built in; set prompt_dir");
  }
  std::set<std::string> names;
  for (const auto& lang : config_.languages) names.insert(claimgen::language_name(lang, config_.language_names));
  set.set_languages(std::move(names));
  return set;
}

void Pipeline::check_health() const {
  if (!hooks_.chat) {
    HttpTarget target{config_.chat.base_url, config_.chat.timeout_ms, {}};
    if (!config_.chat.api_key.empty()) target.headers.emplace_back("Authorization", "Bearer " + config_.chat.api_key);
    try {
      send_with_retries(target, "/models", "", config_.chat.retry);
    } catch (const EndpointError& e) {
      // Some OpenAI-compatible servers have no model listing; only auth
      // failures are conclusive here.
      if (e.status() == 401 || e.status() == 403) throw;
    }
  }
  if (config_.nli_filter && !hooks_.nli) {
    const auto health = filtering::NliClient(config_.nli).health();
    if (health.status != "ok") throw UnavailableError("NLI service reports status '" + health.status + "'", 0);
  }
}

const std::vector<wiki::KnowledgeSource>& Pipeline::sample() {
  if (sources_) return *sources_;
  const auto start = Clock::now();
  if (store_->stage() >= CheckpointStage::Sampled) {
    sources_ = store_->load_sources();
    if (!sources_) throw IntegrityError("checkpoint is past sampling but has no sources");
  } else {
    std::vector<wiki::KnowledgeSource> all;
    for (const auto& lang : config_.languages) {
      auto entries = sample_entries(config_.dumps.at(lang), lang, config_.entry_sample_size, config_.seed);
      report_.eligible_pages[lang] = entries.eligible_pages;
      report_.sampled_entries[lang] = entries.pages.size();
      for (const auto& page : entries.pages) {
        auto sources = wiki::sample_knowledge_sources(wiki::parse_page(page), config_.seed);
        for (auto& s : sources) all.push_back(std::move(s));
      }
    }
    store_->save_sources(all);
    store_->advance(CheckpointStage::Sampled);
    sources_ = std::move(all);
  }
  report_.sources = sources_->size();
  report_.generation_slots = sources_->size() * kAllClasses.size();
  report_.stage_seconds["sample"] = seconds_since(start);
  report_.stage = std::string(to_string(store_->stage()));
  return *sources_;
}

void Pipeline::generate() {
  const auto& sources = sample();
  const auto start = Clock::now();
  const auto prompt_set = prompts();

  const claimgen::ChatEndpoint endpoint = config_.chat;
  const claimgen::ChatFn transport =
      hooks_.chat ? hooks_.chat : [endpoint](std::string_view prompt) { return claimgen::request_generation(prompt, endpoint); };
  const claimgen::ChatFn chat = [&](std::string_view prompt) {
    count_model_call();
    return transport(prompt);
  };

  claimgen::GenerationOptions options;
  options.drop_over_length = config_.drop_over_length;
  options.concurrency = config_.chat_concurrency;
  options.language_names = config_.language_names;

  const auto& done = store_->generations();
  std::size_t reused = 0;
  for (const auto& s : sources) {
    for (const auto cls : kAllClasses) reused += done.count(make_claim_id(s.source_id, cls));
  }
  report_.chat_calls_reused = reused;

  unavailable_.clear();
  std::size_t issued = 0, retries = 0;
  claimgen::generate_all(
      sources, prompt_set, chat, options,
      [&](std::size_t i, ClaimClass cls) { return done.count(make_claim_id(sources[i].source_id, cls)) > 0; },
      [&](claimgen::GenerationEvent&& ev) {
        ++issued;
        retries += static_cast<std::size_t>(ev.retries);
        if (ev.reply) {
          store_->append_generation({ev.record.claim_id, std::move(ev.reply), "", ev.retries});
        } else if (ev.record.rejection && ev.record.rejection->reason == "endpoint_error") {
          store_->append_generation({ev.record.claim_id, std::nullopt, "endpoint_error", ev.retries});
        } else {
          unavailable_[ev.record.claim_id] = ev.record.rejection ? ev.record.rejection->reason : "unavailable";
        }
        report_.chat_calls = issued;
        report_.chat_retries = retries;
      });
  if (unavailable_.empty()) store_->advance(CheckpointStage::Generated);
  report_.stage_seconds["generate"] = seconds_since(start);
  report_.stage = std::string(to_string(store_->stage()));
}

std::vector<ClaimRecord> Pipeline::generated_records() const {
  if (!sources_) throw IntegrityError("generated_records before sample");
  claimgen::GenerationOptions options;
  options.drop_over_length = config_.drop_over_length;
  const auto& done = store_->generations();
  std::vector<ClaimRecord> out;
  out.reserve(sources_->size() * kAllClasses.size());
  for (const auto& s : *sources_) {
    for (const auto cls : kAllClasses) {
      const auto id = make_claim_id(s.source_id, cls);
      if (const auto it = done.find(id); it != done.end()) {
        out.push_back(it->second.reply ? claimgen::record_from_reply(s, cls, *it->second.reply, options)
                                       : claimgen::failed_record(s, cls, it->second.failure));
      } else if (const auto u = unavailable_.find(id); u != unavailable_.end()) {
        out.push_back(claimgen::failed_record(s, cls, u->second));
      } else {
        throw IntegrityError("no generation result for " + id + "; run generate first");
      }
    }
  }
  return out;
}

std::vector<ClaimRecord> Pipeline::filter() {
  auto records = generated_records();
  auto start = Clock::now();
  if (config_.llm_filter) {
    filtering::apply_llm_filter(records);
  } else {
    for (auto& r : records) {
      if (r.status == RecordStatus::Generated) r.status = RecordStatus::PassedLlmFilter;
    }
  }
  store_->advance(CheckpointStage::LlmFiltered);
  report_.stage_seconds["llm_filter"] = seconds_since(start);

  if (config_.nli_filter) {
    start = Clock::now();
    const auto& known = store_->verdicts();
    std::vector<const ClaimRecord*> pending;
    std::size_t reused = 0;
    for (const auto& r : records) {
      if (r.status != RecordStatus::PassedLlmFilter) continue;
      if (known.count(r.claim_id)) ++reused;
      else pending.push_back(&r);
    }
    report_.nli_pairs_reused = reused;

    const filtering::NliClient client(config_.nli);
    const NliFn transport = hooks_.nli ? hooks_.nli : [&client](const std::vector<filtering::wire::Pair>& pairs) {
      return client.classify(pairs);
    };
    const std::size_t batch = config_.nli.batch_size;
    const std::size_t batches = (pending.size() + batch - 1) / batch;
    std::mutex mu;
    parallel_for(batches, config_.nli_concurrency, [&](std::size_t b) {
      const auto first = b * batch;
      const auto last = std::min(pending.size(), first + batch);
      std::vector<filtering::wire::Pair> pairs;
      for (auto i = first; i < last; ++i) {
        const auto& r = *pending[i];
        pairs.emplace_back(r.source_text, r.judgment->claim);
      }
      count_model_call();
      const auto verdicts = transport(pairs);
      if (verdicts.size() != pairs.size()) throw ProtocolError("NLI returned a different number of verdicts");
      std::lock_guard lock(mu);
      ++report_.nli_requests;
      report_.nli_pairs += pairs.size();
      for (auto i = first; i < last; ++i) store_->append_verdict(pending[i]->claim_id, verdicts[i - first]);
    });
    for (auto& r : records) {
      if (r.status == RecordStatus::PassedLlmFilter) filtering::apply_nli_verdict(r, store_->verdicts().at(r.claim_id));
    }
    store_->advance(CheckpointStage::NliFiltered);
    report_.stage_seconds["nli_filter"] = seconds_since(start);
  }

  report_.status_counts.clear();
  report_.drop_reasons.clear();
  report_.over_length = 0;
  for (const auto& r : records) {
    ++report_.status_counts[std::string(to_string(r.status))];
    if (r.rejection) ++report_.drop_reasons[drop_key(*r.rejection)];
    if (r.over_length) ++report_.over_length;
  }
  check_conservation(records, config_.nli_filter);
  report_.stage = std::string(to_string(store_->stage()));
  return records;
}

std::vector<Manifest> Pipeline::export_all() {
  const auto records = filter();
  const auto start = Clock::now();
  const auto dir = export_dir();
  std::vector<Variant> variants = {Variant::NoMnliFiltering};
  if (config_.nli_filter) variants.push_back(Variant::MnliFiltering);

  std::vector<Manifest> manifests;
  for (const auto v : variants) {
    auto files = export_dataset(records, v, dir, config_.languages);
    std::vector<ClaimRecord> selected;
    for (const auto& r : records) {
      if (in_variant(r, v)) selected.push_back(r);
    }
    const auto stats = metrics::compute_stats(selected, config_.languages);
    const auto stem = std::string(to_string(v));
    write_file_atomic(dir / (stem + ".stats.tsv"), metrics::format_stats_tsv(stats));
    write_file_atomic(dir / (stem + ".stats.json"), json(stats).dump(2) + "\n");
    report_.exported[stem] = files.contents.total;
    manifests.push_back(std::move(files.contents));
  }
  report_.distribution = report_distribution(manifests[0], manifests.size() > 1 ? &manifests[1] : nullptr);
  write_file_atomic(dir / "distribution.txt", format_distribution(report_.distribution));
  store_->advance(CheckpointStage::Exported);
  report_.stage_seconds["export"] = seconds_since(start);
  report_.stage = std::string(to_string(store_->stage()));
  return manifests;
}

void Pipeline::write_report() const {
  write_file_atomic(config_.output_dir / "run_report.json", to_json(report_).dump(2) + "\n");
}

RunReport Pipeline::run() {
  const auto start = Clock::now();
  if (!hooks_.skip_health_checks) check_health();
  try {
    sample();
    generate();
    // Slots whose retries ran out are exported as rejected and are retried
    // by the next --resume run, since they never reach the checkpoint.
    export_all();
  } catch (...) {
    report_.stage_seconds["total"] = seconds_since(start);
    write_report();
    throw;
  }
  report_.stage_seconds["total"] = seconds_since(start);
  write_report();
  return report_;
}

}  // namespace synfact::pipeline
