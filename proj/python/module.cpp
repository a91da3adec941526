#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "synfact/claimgen/judgment.hpp"
#include "synfact/claimgen/prompts.hpp"
#include "synfact/common/errors.hpp"
#include "synfact/filtering/filters.hpp"
#include "synfact/humaneval/review.hpp"
#include "synfact/metrics/similarity.hpp"
#include "synfact/metrics/stats.hpp"
#include "synfact/metrics/tokenize.hpp"
#include "synfact/pipeline/pipeline.hpp"
#include "synfact/wikisource/knowledge.hpp"
#include "synfact/wikisource/markup.hpp"
#include "synfact/wikisource/sentences.hpp"

namespace py = pybind11;
using namespace synfact;
using nlohmann::json;

// Structured values cross the boundary as JSON text; the Python package
// turns them into dicts.

namespace {

ClaimRecord record_from(const std::string& text) { return json::parse(text).get<ClaimRecord>(); }

std::vector<ClaimRecord> records_from(const std::string& text) {
  std::vector<ClaimRecord> out;
  for (const auto& j : json::parse(text)) out.push_back(j.get<ClaimRecord>());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the synfact dataset pipeline";

  static py::exception<Error> base(m, "SynfactError");
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<ParseFailure> parse_failure(m, "ParseFailure", base.ptr());
  static py::exception<IntegrityError> integrity_error(m, "IntegrityError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const ParseFailure& e) {
      PyErr_SetString(parse_failure.ptr(), e.what());
    } catch (const IntegrityError& e) {
      PyErr_SetString(integrity_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  // wikisource
  m.def("strip_markup", &wiki::strip_markup, py::arg("wikitext"));
  m.def("split_sentences", &wiki::split_sentences, py::arg("text"), py::arg("language"));
  m.def("is_eligible_sentence", &wiki::is_eligible_sentence, py::arg("sentence"), py::arg("language"));
  m.def(
      "knowledge_sources_json",
      [](std::uint64_t page_id, const std::string& title, const std::string& wikitext, const std::string& language,
         std::uint64_t seed) {
        const wiki::RawPage page{page_id, title, 0, wikitext, language};
        return json(wiki::sample_knowledge_sources(wiki::parse_page(page), seed)).dump();
      },
      py::arg("page_id"), py::arg("title"), py::arg("wikitext"), py::arg("language"), py::arg("seed"));

  // metrics
  m.def("tokenize", [](std::string_view text, std::string_view lang) { return metrics::tokenize(text, lang).tokens; },
        py::arg("text"), py::arg("language") = "en");
  m.def("count_words", &metrics::count_words, py::arg("text"), py::arg("language") = "en");
  m.def("bleu4", [](const std::vector<std::string>& r, const std::vector<std::string>& c) { return metrics::bleu4(r, c); },
        py::arg("reference"), py::arg("candidate"));
  m.def("rouge_l",
        [](const std::vector<std::string>& r, const std::vector<std::string>& c) { return metrics::rouge_l(r, c); },
        py::arg("reference"), py::arg("candidate"));
  m.def("meteor", [](const std::vector<std::string>& r, const std::vector<std::string>& c) { return metrics::meteor(r, c); },
        py::arg("reference"), py::arg("candidate"));
  m.def(
      "score_pair",
      [](std::string_view source, std::string_view claim, std::string_view lang) {
        const auto s = metrics::score_pair(source, claim, lang);
        return py::dict(py::arg("bleu4") = s.bleu4, py::arg("rouge_l") = s.rouge_l, py::arg("meteor") = s.meteor);
      },
      py::arg("source"), py::arg("claim"), py::arg("language") = "en");
  m.def(
      "compute_stats_json",
      [](const std::string& records, const std::vector<std::string>& languages) {
        return json(metrics::compute_stats(records_from(records), languages)).dump();
      },
      py::arg("records_json"), py::arg("languages") = std::vector<std::string>{});

  // claimgen
  m.def(
      "build_prompt",
      [](const std::string& cls, std::string_view language, std::string_view topic, std::string_view sources) {
        return claimgen::PromptSet::builtin().build(parse_claim_class(cls), language, topic, sources);
      },
      py::arg("claim_class"), py::arg("language"), py::arg("topic"), py::arg("sources"));
  m.def(
      "parse_generation_json", [](std::string_view reply) { return json(claimgen::parse_generation(reply)).dump(); },
      py::arg("reply"));

  // filtering
  m.def(
      "llm_filter",
      [](const std::string& judgment, const std::string& cls) {
        const auto d = filtering::llm_filter(json::parse(judgment).get<GenerationJudgment>(), parse_claim_class(cls));
        return py::make_tuple(d.keep, d.reason);
      },
      py::arg("judgment_json"), py::arg("claim_class"));
  m.def(
      "nli_filter",
      [](const std::array<double, 3>& probs, const std::string& cls) {
        const auto d = filtering::nli_filter(make_verdict(probs), parse_claim_class(cls));
        return py::make_tuple(d.keep, d.reason);
      },
      py::arg("probs"), py::arg("claim_class"),
      "probs are ordered entailment, neutral, contradiction");

  // pipeline
  m.def(
      "load_config_json", [](const std::filesystem::path& p) { return pipeline::load_config(p).to_json().dump(); },
      py::arg("path"));
  m.def(
      "run_json",
      [](const std::filesystem::path& config, bool resume) {
        py::gil_scoped_release release;
        pipeline::Pipeline p(pipeline::load_config(config), resume);
        return pipeline::to_json(p.run()).dump();
      },
      py::arg("config"), py::arg("resume") = false);
  m.def(
      "load_dataset_json",
      [](const std::filesystem::path& p) {
        json out = json::array();
        for (const auto& r : pipeline::load_dataset(p)) out.push_back(r);
        return out.dump();
      },
      py::arg("path"));
  m.def("export_line", [](const std::string& record) { return pipeline::export_line(record_from(record)); },
        py::arg("record_json"));

  // humaneval
  m.def(
      "check_convergence_json",
      [](const std::vector<std::filesystem::path>& sheets, double threshold) {
        const auto ingested = humaneval::ingest_ratings(sheets);
        auto j = humaneval::to_json(humaneval::check_convergence(ingested.ratings, threshold));
        j["row_errors"] = ingested.errors.size();
        return j.dump();
      },
      py::arg("sheets"), py::arg("threshold") = 4.0);

  m.attr("SCHEMA_VERSION") = pipeline::kSchemaVersion;
}
