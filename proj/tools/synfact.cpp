// synfact: command-line front end for the dataset pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"
#include "synfact/humaneval/review.hpp"
#include "synfact/metrics/stats.hpp"
#include "synfact/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace synfact;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 usage/config, 2 not converged, 3 endpoint or data failure,
// 4 interrupted.
constexpr int kExitConfig = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitInterrupted = 4;

struct Globals {
  std::string config_path = "synfact.json";
  std::optional<std::uint64_t> seed;
  bool resume = false;
};

pipeline::PipelineConfig load(const Globals& g) {
  auto c = pipeline::load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  c.validate();
  return c;
}

// Stage subcommands continue whatever checkpoint exists.
pipeline::Pipeline open_stage(const Globals& g) { return pipeline::Pipeline(load(g), true); }

void print_counts(const pipeline::RunReport& r) {
  std::cout << "sources: " << r.sources << ", generation slots: " << r.generation_slots << "\n";
  for (const auto& [status, n] : r.status_counts) std::cout << "  " << status << ": " << n << "\n";
  for (const auto& [reason, n] : r.drop_reasons) std::cout << "  dropped " << reason << ": " << n << "\n";
}

pipeline::Variant default_variant(const pipeline::PipelineConfig& c) {
  return c.nli_filter ? pipeline::Variant::MnliFiltering : pipeline::Variant::NoMnliFiltering;
}

fs::path variant_file(const pipeline::PipelineConfig& c, pipeline::Variant v) {
  return c.output_dir / "export" / (std::string(pipeline::to_string(v)) + ".jsonl");
}

int cmd_sample(const Globals& g) {
  auto p = open_stage(g);
  const auto& sources = p.sample();
  p.write_report();
  for (const auto& [lang, n] : p.report().sampled_entries) {
    std::cout << lang << ": " << n << " entries of " << p.report().eligible_pages.at(lang) << "\n";
  }
  std::cout << sources.size() << " knowledge sources\n";
  return 0;
}

int cmd_generate(const Globals& g) {
  auto p = open_stage(g);
  p.check_health();
  p.generate();
  p.write_report();
  const auto& r = p.report();
  std::cout << "chat calls: " << r.chat_calls << " issued, " << r.chat_calls_reused << " from checkpoint, "
            << r.chat_retries << " retries\n";
  if (p.stage() < pipeline::CheckpointStage::Generated) {
    std::cerr << "some slots failed with the endpoint unavailable; rerun generate to retry them\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_filter(const Globals& g) {
  auto p = open_stage(g);
  if (p.stage() < pipeline::CheckpointStage::Generated) {
    throw ConfigError("generation is incomplete; run generate first");
  }
  if (p.config().nli_filter) p.check_health();
  p.sample();
  p.filter();
  p.write_report();
  print_counts(p.report());
  return 0;
}

int cmd_export(const Globals& g) {
  auto p = open_stage(g);
  if (p.stage() < pipeline::CheckpointStage::Generated) {
    throw ConfigError("generation is incomplete; run generate first");
  }
  if (p.config().nli_filter) p.check_health();
  p.sample();
  for (const auto& m : p.export_all()) {
    std::cout << pipeline::to_string(m.variant) << ": " << m.total << " records\n";
  }
  p.write_report();
  return 0;
}

int cmd_stats(const Globals& g, const std::string& input, const std::string& variant, bool as_json) {
  const auto c = load(g);
  const fs::path path = !input.empty() ? fs::path(input)
                                       : variant_file(c, variant.empty() ? default_variant(c)
                                                                         : pipeline::parse_variant(variant));
  const auto records = pipeline::load_dataset(path);
  const auto rows = metrics::compute_stats(records, c.languages);
  if (as_json) {
    std::cout << json(rows).dump(2) << "\n";
  } else {
    std::cout << metrics::format_stats_tsv(rows);
  }
  return 0;
}

int cmd_report(const Globals& g, bool as_json) {
  const auto c = load(g);
  const auto dir = c.output_dir / "export";
  const auto none = pipeline::read_manifest(dir / "no_mnli_filtering.manifest.json");
  std::optional<pipeline::Manifest> mnli;
  if (fs::exists(dir / "mnli_filtering.manifest.json")) mnli = pipeline::read_manifest(dir / "mnli_filtering.manifest.json");
  const auto rows = pipeline::report_distribution(none, mnli ? &*mnli : nullptr);
  if (as_json) {
    std::cout << pipeline::to_json(rows).dump(2) << "\n";
  } else {
    std::cout << pipeline::format_distribution(rows);
  }
  return 0;
}

int cmd_run(const Globals& g, std::optional<std::size_t> max_calls) {
  pipeline::RunHooks hooks;
  hooks.max_model_calls = max_calls;
  pipeline::Pipeline p(load(g), g.resume, hooks);
  const auto r = p.run();
  print_counts(r);
  for (const auto& [variant, n] : r.exported) std::cout << variant << ": " << n << " records\n";
  std::cout << pipeline::format_distribution(r.distribution);
  return 0;
}

int cmd_review_export(const Globals& g, const std::string& input, const std::string& out_dir,
                      std::optional<std::size_t> per_class) {
  const auto c = load(g);
  const auto records = pipeline::load_dataset(input.empty() ? variant_file(c, default_variant(c))
                                                            : fs::path(input));
  // Review sampling takes NLI survivors only; a run without the NLI stage has
  // none, so its records are treated as survivors here.
  std::vector<ClaimRecord> pool = records;
  if (!c.nli_filter) {
    for (auto& r : pool) {
      if (r.status == RecordStatus::PassedLlmFilter) r.status = RecordStatus::PassedNliFilter;
    }
  }
  const auto sample = humaneval::sample_for_review(pool, per_class.value_or(c.review_per_class), c.seed);
  const fs::path dir = out_dir.empty() ? c.output_dir / "review" : fs::path(out_dir);
  for (const auto& path : humaneval::export_review_sheets(sample, dir, c.raters)) std::cout << path.string() << "\n";
  std::cout << sample.size() << " claims per sheet\n";
  return 0;
}

humaneval::IngestResult ingest(const std::vector<std::string>& sheets) {
  std::vector<fs::path> paths(sheets.begin(), sheets.end());
  auto res = humaneval::ingest_ratings(paths);
  for (const auto& e : res.errors) std::cerr << e.file << ":" << e.line << ": " << e.message << "\n";
  return res;
}

int cmd_review_ingest(const std::vector<std::string>& sheets, const std::string& out) {
  const auto res = ingest(sheets);
  json ratings = json::array();
  for (const auto& r : res.ratings) {
    ratings.push_back({{"claim_id", r.claim_id},
                       {"rater_id", r.rater_id},
                       {"target_class", r.target_class},
                       {"overall_quality", r.overall_quality},
                       {"grammaticality", r.grammaticality},
                       {"semantic_relation", r.semantic_relation},
                       {"label_correct", r.label_correct}});
  }
  const json summary = {{"ratings", ratings}, {"row_errors", res.errors.size()}, {"blank_rows", res.blank_rows}};
  if (out.empty()) {
    std::cout << summary.dump(2) << "\n";
  } else {
    write_file_atomic(out, summary.dump(2) + "\n");
  }
  std::cerr << res.ratings.size() << " ratings, " << res.errors.size() << " row errors, " << res.blank_rows
            << " blank rows\n";
  return res.errors.empty() ? 0 : kExitConfig;
}

int cmd_review_check(const std::vector<std::string>& sheets, double threshold) {
  const auto res = ingest(sheets);
  const auto report = humaneval::check_convergence(res.ratings, threshold);
  std::cout << humaneval::to_json(report).dump(2) << "\n";
  return report.converged ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build multilingual claim/source datasets from Wikipedia dumps"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("-c,--config", g.config_path, "JSON config file")->capture_default_str();
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_flag("--resume", g.resume, "Continue the checkpoint in the output directory (run only)");

  auto* sample = app.add_subcommand("sample", "Sample entries and knowledge sources");
  auto* generate = app.add_subcommand("generate", "Generate claims for every sampled source");
  auto* filter = app.add_subcommand("filter", "Apply the LLM and NLI filters and print counts");
  auto* exp = app.add_subcommand("export", "Write dataset variants, manifests and stats");

  std::string stats_input, stats_variant;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Per-language, per-class statistics of an exported variant");
  stats->add_option("--input", stats_input, "Exported .jsonl file");
  stats->add_option("--variant", stats_variant, "no_mnli_filtering or mnli_filtering");
  stats->add_flag("--json", stats_json);

  bool report_json = false;
  auto* report = app.add_subcommand("report", "Class distribution of both variants");
  report->add_flag("--json", report_json);

  std::optional<std::size_t> max_calls;
  auto* run = app.add_subcommand("run", "All stages end to end");
  run->add_option("--max-model-calls", max_calls, "Stop after this many chat calls plus NLI requests");

  auto* review = app.add_subcommand("review", "Human evaluation sheets");
  review->require_subcommand(1);
  std::string review_input, review_dir, ingest_out;
  std::optional<std::size_t> per_class;
  auto* review_export = review->add_subcommand("export", "Write rating sheets, one per rater");
  review_export->add_option("--input", review_input, "Exported .jsonl file (default: the filtered variant)");
  review_export->add_option("--dir", review_dir, "Output directory (default: <output_dir>/review)");
  review_export->add_option("--per-class", per_class, "Claims per class");
  std::vector<std::string> sheets;
  auto* review_ingest = review->add_subcommand("ingest", "Validate filled sheets and dump the ratings");
  review_ingest->add_option("sheets", sheets, "Filled TSV sheets")->required()->check(CLI::ExistingFile);
  review_ingest->add_option("-o,--out", ingest_out, "Write ratings JSON here instead of stdout");
  double threshold = 4.0;
  auto* review_check = review->add_subcommand("check", "Exit 0 when every aspect mean is above the threshold");
  review_check->add_option("sheets", sheets, "Filled TSV sheets")->required()->check(CLI::ExistingFile);
  review_check->add_option("--threshold", threshold)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return cmd_sample(g);
    if (*generate) return cmd_generate(g);
    if (*filter) return cmd_filter(g);
    if (*exp) return cmd_export(g);
    if (*stats) return cmd_stats(g, stats_input, stats_variant, stats_json);
    if (*report) return cmd_report(g, report_json);
    if (*run) return cmd_run(g, max_calls);
    if (*review_export) return cmd_review_export(g, review_input, review_dir, per_class);
    if (*review_ingest) return cmd_review_ingest(sheets, ingest_out);
    if (*review_check) return cmd_review_check(sheets, threshold);
  } catch (const pipeline::Interrupted& e) {
    std::cerr << e.what() << "; rerun with --resume to continue\n";
    return kExitInterrupted;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
