// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
//
// Environment:
//   SYNFACT_REAL_DUMP=<path>[:lang]  run the parser check on a real dump slice
//                                    instead of the synthetic one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <boost/iostreams/copy.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "records_gen.hpp"
#include "synfact/claimgen/prompts.hpp"
#include "synfact/common/files.hpp"
#include "synfact/common/rng.hpp"
#include "synfact/filtering/filters.hpp"
#include "synfact/humaneval/review.hpp"
#include "synfact/metrics/similarity.hpp"
#include "synfact/metrics/stats.hpp"
#include "synfact/metrics/tokenize.hpp"
#include "synfact/mock/endpoints.hpp"
#include "synfact/pipeline/pipeline.hpp"
#include "synfact/wikisource/dump_reader.hpp"
#include "synfact/wikisource/markup.hpp"
#include "synfact/wikisource/sentences.hpp"

using namespace synfact;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes.
constexpr double kMetricTolerance = 1e-9;
constexpr double kMergeTolerance = 1e-9;
constexpr double kDeterminismSeconds = 30.0;
constexpr double kMinTerminalFraction = 0.95;
constexpr std::size_t kDeterminismPages = 20;
constexpr std::size_t kFilterRecords = 200;
constexpr std::size_t kMetricPairs = 500;
constexpr std::size_t kPatternPairs = 300;
constexpr std::size_t kParserPages = 1000;
constexpr std::size_t kMergePartitions = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

// ---------------------------------------------------------------------------
// End-to-end determinism

const std::vector<std::string> kLanguages = {"en", "es", "de"};

pipeline::PipelineConfig fixture_config(const fs::path& root, const fs::path& dumps, const mock::ChatServer& chat,
                                        const mock::NliServer& nli, std::uint64_t seed = 2024) {
  pipeline::PipelineConfig c;
  c.languages = kLanguages;
  for (const auto& lang : kLanguages) c.dumps[lang] = dumps / (lang + ".xml.bz2");
  c.entry_sample_size = kDeterminismPages;
  c.seed = seed;
  c.chat.base_url = chat.base_url();
  c.chat.api_key = "acceptance";
  c.chat.retry.initial_backoff = std::chrono::milliseconds(1);
  c.nli.base_url = nli.base_url();
  c.nli.batch_size = 8;
  c.output_dir = root;
  return c;
}

// Every exported byte, keyed by file name.
std::map<std::string, std::string> export_bytes(const fs::path& out) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(out / "export")) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

Outcome check_subset(const fs::path& out) {
  const auto dir = out / "export";
  const auto none = pipeline::read_manifest(dir / "no_mnli_filtering.manifest.json");
  const auto mnli = pipeline::read_manifest(dir / "mnli_filtering.manifest.json");
  std::size_t cells = 0;
  for (const auto& [lang, counts] : none.counts) {
    const auto it = mnli.counts.find(lang);
    if (it == mnli.counts.end()) return {false, "language " + lang + " missing from mnli manifest"};
    for (std::size_t k = 0; k < 3; ++k) {
      ++cells;
      if (it->second[k] > counts[k]) {
        return {false, lang + "/" + std::string(to_string(kAllClasses[k])) + ": " + std::to_string(it->second[k]) +
                           " > " + std::to_string(counts[k])};
      }
    }
  }
  if (mnli.counts.size() != none.counts.size()) return {false, "manifests cover different languages"};
  try {
    pipeline::report_distribution(none, &mnli);
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  return {true, std::to_string(cells) + " cells, " + std::to_string(mnli.total) + " <= " + std::to_string(none.total)};
}

struct DeterminismResult {
  Outcome determinism;
  std::vector<fs::path> outputs;
};

DeterminismResult determinism(const fs::path& work) {
  DeterminismResult res;
  const auto dumps = work / "dumps";
  fs::create_directories(dumps);
  for (const auto& lang : kLanguages) {
    testing::write_dump(dumps / (lang + ".xml.bz2"), {.language = lang, .articles = kDeterminismPages, .seed = 7});
  }
  mock::ChatServer chat({.fail_first = 2, .required_key = "acceptance"});
  mock::NliServer nli;

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::map<std::string, std::string>> runs;
  for (int i = 0; i < 3; ++i) {
    const auto out = work / ("run" + std::to_string(i));
    pipeline::Pipeline p(fixture_config(out, dumps, chat, nli), false);
    p.run();
    runs.push_back(export_bytes(out));
    res.outputs.push_back(out);
  }
  const auto interrupted = work / "interrupted";
  std::size_t interruptions = 0;
  for (const std::size_t budget : {25u, 60u, 0u}) {
    pipeline::RunHooks hooks;
    if (budget) hooks.max_model_calls = budget;
    try {
      pipeline::Pipeline p(fixture_config(interrupted, dumps, chat, nli), interruptions > 0, hooks);
      p.run();
    } catch (const pipeline::Interrupted&) {
      ++interruptions;
    }
  }
  runs.push_back(export_bytes(interrupted));
  res.outputs.push_back(interrupted);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool same = true;
  for (std::size_t i = 1; i < runs.size(); ++i) same = same && runs[i] == runs[0];
  std::size_t bytes = 0;
  for (const auto& [name, text] : runs[0]) bytes += text.size();
  const bool nonempty = runs[0].count("no_mnli_filtering.jsonl") && runs[0].count("mnli_filtering.manifest.json") &&
                        !runs[0].at("mnli_filtering.jsonl").empty();
  res.determinism.pass = same && nonempty && interruptions == 2 && seconds < kDeterminismSeconds;
  res.determinism.detail = std::to_string(runs.size()) + " runs (" + std::to_string(interruptions) +
                           " interruptions), " + std::to_string(runs[0].size()) + " files, " +
                           std::to_string(bytes) + " bytes, identical=" + (same ? "yes" : "no") + ", " +
                           fmt(seconds, 1) + "s < " + fmt(kDeterminismSeconds, 0) + "s";
  return res;
}

// ---------------------------------------------------------------------------
// Filter rules

// The rules written out as literal tables, independent of filters.cpp.
// kCategoryKeeps[class][category]: C0, C1, C2 columns.
constexpr bool kCategoryKeeps[3][3] = {
    /* supports */ {false, true, false},
    /* refutes  */ {true, false, false},
    /* not-info */ {false, false, true},
};
// kLabelKeeps[class][label]: entailment, neutral, contradiction columns.
constexpr bool kLabelKeeps[3][3] = {
    /* supports */ {true, false, false},
    /* refutes  */ {false, false, true},
    /* not-info */ {false, true, false},
};

Outcome filter_rules() {
  struct Case {
    int cls, cat, sc, q, label;
  };
  std::vector<Case> cases;
  // Every category x class pair at every self_contained/quality boundary.
  for (int cls = 0; cls < 3; ++cls)
    for (int cat = 0; cat < 3; ++cat)
      for (int sc : {3, 4})
        for (int q : {3, 4}) cases.push_back({cls, cat, sc, q, 0});
  // Every NLI label x class pair on records that pass the LLM filter.
  const int matching_cat[3] = {1, 0, 2};
  for (int cls = 0; cls < 3; ++cls)
    for (int label = 0; label < 3; ++label) cases.push_back({cls, matching_cat[cls], 4, 4, label});
  Rng rng(derive_seed(99, "acceptance/filters"));
  while (cases.size() < kFilterRecords) {
    cases.push_back({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(5)),
                     1 + static_cast<int>(rng.below(5)), static_cast<int>(rng.below(3))});
  }

  std::set<std::pair<int, int>> cat_pairs, label_pairs;
  std::size_t mismatches = 0, kept_llm = 0, kept_nli = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    ClaimRecord r;
    r.claim_id = "case-" + std::to_string(i);
    r.target_class = kAllClasses[c.cls];
    r.judgment = GenerationJudgment{"x", c.sc, static_cast<Category>(c.cat), 3, "real", 3, c.q};
    std::vector<ClaimRecord> one{r};
    filtering::apply_llm_filter(one);
    const bool llm_expected = kCategoryKeeps[c.cls][c.cat] && c.sc >= 4 && c.q >= 4;
    if ((one[0].status == RecordStatus::PassedLlmFilter) != llm_expected) ++mismatches;
    cat_pairs.insert({c.cls, c.cat});
    if (!llm_expected) continue;
    ++kept_llm;
    std::array<double, 3> probs{0.1, 0.1, 0.1};
    const NliLabel labels[3] = {NliLabel::Entailment, NliLabel::Neutral, NliLabel::Contradiction};
    probs[static_cast<std::size_t>(labels[c.label])] = 0.8;
    filtering::apply_nli_verdict(one[0], make_verdict(probs));
    const bool nli_expected = kLabelKeeps[c.cls][c.label];
    if ((one[0].status == RecordStatus::PassedNliFilter) != nli_expected) ++mismatches;
    if (!nli_expected && !(one[0].rejection && one[0].rejection->stage == Stage::NliFilter)) ++mismatches;
    label_pairs.insert({c.cls, c.label});
    kept_nli += nli_expected;
  }
  const bool covered = cat_pairs.size() == 9 && label_pairs.size() == 9;
  return {mismatches == 0 && covered && cases.size() == kFilterRecords,
          std::to_string(cases.size()) + " records, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(cat_pairs.size()) + "/9 category pairs, " + std::to_string(label_pairs.size()) +
              "/9 label pairs, kept " + std::to_string(kept_llm) + " -> " + std::to_string(kept_nli)};
}

// ---------------------------------------------------------------------------
// Subset property on several runs

Outcome subset(const std::vector<fs::path>& outputs, const fs::path& work) {
  std::vector<fs::path> all = outputs;
  // More runs with other seeds through in-process mocks.
  const auto dumps = work / "dumps";
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    pipeline::PipelineConfig c;
    c.languages = kLanguages;
    for (const auto& lang : kLanguages) c.dumps[lang] = dumps / (lang + ".xml.bz2");
    c.entry_sample_size = 12;
    c.seed = seed;
    c.chat.base_url = "http://in-process/v1";
    c.nli.base_url = "http://in-process";
    c.output_dir = work / ("seed" + std::to_string(seed));
    pipeline::RunHooks hooks;
    hooks.chat = [](std::string_view prompt) { return claimgen::ChatResponse{mock::canned_reply(prompt), 0}; };
    hooks.nli = [](const std::vector<filtering::wire::Pair>& pairs) {
      std::vector<NliVerdict> out;
      for (const auto& [p, h] : pairs) out.push_back(mock::heuristic_verdict(p, h));
      return out;
    };
    hooks.skip_health_checks = true;
    pipeline::Pipeline(c, false, hooks).run();
    all.push_back(c.output_dir);
  }
  std::size_t strict = 0;
  for (const auto& out : all) {
    const auto r = check_subset(out);
    if (!r.pass) return {false, out.filename().string() + ": " + r.detail};
    const auto a = pipeline::read_manifest(out / "export/no_mnli_filtering.manifest.json");
    const auto b = pipeline::read_manifest(out / "export/mnli_filtering.manifest.json");
    strict += b.total < a.total;
  }
  return {true, std::to_string(all.size()) + " runs hold per (language, class); NLI removed records in " +
                    std::to_string(strict) + " of them"};
}

// ---------------------------------------------------------------------------
// Metric oracles

Outcome metric_oracles() {
  Rng rng(derive_seed(7, "acceptance/metrics"));
  auto seq = [&](std::size_t vocab, std::size_t max_len) {
    std::vector<std::string> out(rng.below(max_len + 1));
    for (auto& t : out) t = "t" + std::to_string(rng.below(vocab));
    return out;
  };
  double worst = 0.0;
  std::size_t out_of_range = 0;
  for (std::size_t i = 0; i < kMetricPairs; ++i) {
    const auto vocab = 2 + rng.below(12);
    const auto ref = seq(vocab, 20);
    const auto cand = seq(vocab, 20);
    const double got[3] = {metrics::bleu4(ref, cand), metrics::rouge_l(ref, cand), metrics::meteor(ref, cand)};
    const double want[3] = {oracle::bleu4(ref, cand), oracle::rouge_l(ref, cand), oracle::meteor(ref, cand)};
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(got[k] - want[k]));
      out_of_range += !(got[k] >= 0.0 && got[k] <= 1.0);
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", worst);
  return {worst <= kMetricTolerance && out_of_range == 0,
          std::to_string(kMetricPairs) + " pairs, max |diff| " + buf + " (tol 1e-9), " + std::to_string(out_of_range) +
              " outside [0,1]"};
}

// ---------------------------------------------------------------------------
// Similarity ordering on a hand-built fixture

struct PatternPair {
  std::string language;
  ClaimClass cls;
  std::string source;
  std::string claim;
};

// Source sentences come from templates with slot fills. A supports claim
// restates the source with a clause dropped or reordered, a refutes claim
// negates it and changes one fact, a not-info claim moves to a related but
// unstated topic.
struct LanguageBank {
  std::string lang;
  std::vector<std::string> names, kinds, places, people;
  std::string source, support_a, support_b, refute_a, refute_b, drift_a, drift_b;
};

std::string fill(std::string text, const std::map<std::string, std::string>& slots) {
  for (const auto& [k, v] : slots) {
    for (std::size_t pos = text.find(k); pos != std::string::npos; pos = text.find(k, pos + v.size())) {
      text.replace(pos, k.size(), v);
    }
  }
  return text;
}

std::vector<LanguageBank> pattern_banks() {
  return {
      {"en",
       {"Harlow Bridge", "The Merton Library", "Castle Aldric", "The Vell Observatory", "Saint Oda Abbey",
        "The Rinn Canal", "Fort Garrow", "The Tamsin Theatre", "Lake Orrin Dam", "The Brisk Museum"},
       {"stone bridge", "public library", "hill fort", "observatory", "abbey", "canal", "coastal fort", "theatre",
        "gravity dam", "history museum"},
       {"Leeds", "Oxford", "Durham", "Galway", "York", "Bristol", "Cork", "Bath", "Exeter", "Hull"},
       {"Thomas Reed", "Anne Walsh", "Hugh Carver", "Mary Doyle", "Peter Lane", "Ellen Price", "John Hale",
        "Clara Moss", "Owen Pike", "Ruth Fenn"},
       "{name} is a {kind} in {place} that was completed in {year} under the direction of {person}.",
       "{name} is a {kind} in {place} that was completed in {year}.",
       "{name} in {place} is a {kind} completed in {year} under the direction of {person}.",
       "{name} is not a {kind} in {place}, and it was never directed by {person}.",
       "It is not true that {name} was completed in {other_year} in {other_place}.",
       "Many tourists enjoy walking along the river during the summer festival.",
       "Local farmers sell fresh vegetables at the weekly market near the station."},
      {"es",
       {"El Puente Viejo", "La Biblioteca Mayor", "El Castillo de Olmo", "El Observatorio Real", "La Abadía de Santa Inés",
        "El Canal del Norte", "El Fuerte de San Lucas", "El Teatro Colón", "La Presa del Lago Azul", "El Museo Naval"},
       {"puente de piedra", "biblioteca pública", "castillo", "observatorio", "abadía", "canal", "fuerte costero",
        "teatro", "presa", "museo de historia"},
       {"Sevilla", "Toledo", "Burgos", "Cádiz", "León", "Murcia", "Soria", "Lugo", "Teruel", "Zamora"},
       {"Juan Pérez", "Ana Ruiz", "Luis Gómez", "María Díaz", "Pedro Sanz", "Elena Gil", "José Vega", "Clara Mora",
        "Pablo Ríos", "Rosa León"},
       "{name} es un {kind} en {place} que fue terminado en {year} bajo la dirección de {person}.",
       "{name} es un {kind} en {place} que fue terminado en {year}.",
       "{name} en {place} es un {kind} terminado en {year} bajo la dirección de {person}.",
       "{name} no es un {kind} en {place} y nunca fue dirigido por {person}.",
       "No es cierto que {name} fuera terminado en {other_year} en {other_place}.",
       "Muchos turistas disfrutan paseando junto al río durante las fiestas de verano.",
       "Los agricultores venden verduras frescas en el mercado semanal cerca de la estación."},
      {"de",
       {"Die Alte Brücke", "Die Stadtbibliothek", "Die Burg Eichstein", "Die Sternwarte Hohenfeld", "Das Kloster Sankt Ida",
        "Der Nordkanal", "Die Festung Garnholm", "Das Stadttheater", "Die Talsperre Lindau", "Das Heimatmuseum"},
       {"Steinbrücke", "öffentliche Bibliothek", "Höhenburg", "Sternwarte", "Abtei", "Kanal", "Küstenfestung",
        "Theater", "Talsperre", "Geschichtsmuseum"},
       {"Leipzig", "Bremen", "Trier", "Kassel", "Ulm", "Jena", "Passau", "Lübeck", "Goslar", "Speyer"},
       {"Karl Weber", "Anna Vogel", "Hans Becker", "Maria Keller", "Peter Lang", "Eva Roth", "Jonas Haas",
        "Clara Brandt", "Otto Fuchs", "Ruth Krause"},
       "{name} ist eine {kind} in {place}, die im Jahr {year} unter der Leitung von {person} fertiggestellt wurde.",
       "{name} ist eine {kind} in {place}, die im Jahr {year} fertiggestellt wurde.",
       "{name} in {place} ist eine {kind}, fertiggestellt im Jahr {year} unter der Leitung von {person}.",
       "{name} ist keine {kind} in {place} und wurde nie von {person} geleitet.",
       "Es stimmt nicht, dass {name} im Jahr {other_year} in {other_place} fertiggestellt wurde.",
       "Viele Touristen spazieren im Sommer während des Festes gern am Fluss entlang.",
       "Die Bauern verkaufen frisches Gemüse auf dem Wochenmarkt in der Nähe des Bahnhofs."},
  };
}

std::vector<PatternPair> pattern_fixture() {
  std::vector<PatternPair> pairs;
  const auto banks = pattern_banks();
  const std::size_t per_language = kPatternPairs / banks.size();
  for (const auto& b : banks) {
    for (std::size_t i = 0; i < per_language; ++i) {
      const auto n = b.names.size();
      const std::map<std::string, std::string> slots = {
          {"{name}", b.names[i % n]},
          {"{kind}", b.kinds[i % n]},
          {"{place}", b.places[(i / n + i) % n]},
          {"{person}", b.people[(i * 3) % n]},
          {"{year}", std::to_string(1700 + (i * 37) % 250)},
          {"{other_year}", std::to_string(1700 + (i * 37 + 91) % 250)},
          {"{other_place}", b.places[(i / n + i + 5) % n]},
      };
      const auto cls = kAllClasses[i % 3];
      const bool alt = (i / 3) % 2;
      std::string claim;
      switch (cls) {
        case ClaimClass::Supports: claim = alt ? b.support_b : b.support_a; break;
        case ClaimClass::Refutes: claim = alt ? b.refute_b : b.refute_a; break;
        case ClaimClass::NotInfo: claim = alt ? b.drift_b : b.drift_a; break;
      }
      pairs.push_back({b.lang, cls, fill(b.source, slots), fill(claim, slots)});
    }
  }
  return pairs;
}

Outcome similarity_pattern() {
  const auto pairs = pattern_fixture();
  // sums[lang][metric][class]
  std::map<std::string, std::array<std::array<double, 3>, 3>> sums;
  std::map<std::string, std::array<int, 3>> counts;
  for (const auto& p : pairs) {
    const auto s = metrics::score_pair(p.source, p.claim, p.language);
    const auto k = static_cast<std::size_t>(p.cls);
    sums[p.language][0][k] += s.bleu4;
    sums[p.language][1][k] += s.rouge_l;
    sums[p.language][2][k] += s.meteor;
    ++counts[p.language][k];
  }
  bool ok = pairs.size() == kPatternPairs;
  std::string detail = std::to_string(pairs.size()) + " pairs;";
  const char* names[3] = {"BLEU-4", "ROUGE-L", "METEOR"};
  for (const auto& lang : kLanguages) {
    detail += " " + lang;
    for (int m = 0; m < 3; ++m) {
      double mean[3];
      for (int k = 0; k < 3; ++k) mean[k] = sums[lang][m][k] / counts[lang][k];
      ok = ok && mean[0] > mean[1] && mean[1] > mean[2];
      detail += std::string(m ? "," : " ") + names[m] + "=" + fmt(mean[0], 2) + "/" + fmt(mean[1], 2) + "/" +
                fmt(mean[2], 2);
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// Prompt fidelity

std::string normalize_prompt(std::string text) {
  text = std::regex_replace(text, std::regex(R"(\{language\})"), "<language>");
  text = std::regex_replace(text, std::regex(R"(\s+)"), " ");
  while (!text.empty() && text.back() == ' ') text.pop_back();
  while (!text.empty() && text.front() == ' ') text.erase(0, 1);
  return text;
}

Outcome prompt_fidelity() {
  const fs::path root(SYNFACT_SOURCE_DIR);
  const auto builtin = claimgen::PromptSet::builtin();
  const auto shipped = claimgen::PromptSet::load(root / "prompts", "v1");
  std::size_t same = 0;
  std::string detail;
  for (const auto cls : kAllClasses) {
    const auto stem = std::string(claimgen::template_file_stem(cls));
    const auto golden = normalize_prompt(read_file(root / "tests/golden/prompts" / (stem + ".txt")));
    const bool ok = normalize_prompt(builtin.template_text(cls)) == golden &&
                    normalize_prompt(shipped.template_text(cls)) == golden;
    same += ok;
    detail += stem + (ok ? "=match " : "=DIFF ");
  }
  return {same == 3, detail + "(" + std::to_string(same) + "/3 templates)"};
}

// ---------------------------------------------------------------------------
// Parser robustness

std::string decompressed(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  boost::iostreams::filtering_istream in;
  const auto c = wiki::compression_for(path);
  if (c == wiki::Compression::Gzip) in.push(boost::iostreams::gzip_decompressor());
  if (c == wiki::Compression::Bzip2) in.push(boost::iostreams::bzip2_decompressor());
  in.push(file);
  std::ostringstream out;
  boost::iostreams::copy(in, out);
  return out.str();
}

bool ends_terminal(const std::string& s) {
  static const std::vector<std::string> kEnds = {".", "!", "?", "…", ".\"", "!\"", "?\"", ".)", ".»", ".“", ".”", "?»", "!»"};
  for (const auto& e : kEnds) {
    if (s.size() >= e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) return true;
  }
  return false;
}

Outcome parser_robustness(const fs::path& work) {
  fs::path dump;
  std::string lang = "en";
  std::string source = "synthetic";
  if (const char* real = std::getenv("SYNFACT_REAL_DUMP"); real && *real) {
    std::string value = real;
    if (const auto colon = value.rfind(':'); colon != std::string::npos && value.size() - colon <= 4) {
      lang = value.substr(colon + 1);
      value.resize(colon);
    }
    dump = value;
    source = "real " + dump.filename().string();
  } else {
    dump = work / "parser.xml.gz";
    testing::DumpOptions o;
    o.language = "en";
    o.articles = kParserPages;
    o.seed = 31;
    testing::write_dump(dump, o);
  }
  std::size_t pages = 0, sentences = 0, terminal = 0, punctuated = 0, crashes = 0;
  std::uint64_t pages_seen = 0;
  try {
    wiki::PageStream stream(dump, lang);
    while (auto page = stream.next()) {
      ++pages;
      try {
        const auto article = wiki::strip_article(page->wikitext);
        for (const auto& para : article.paragraphs) {
          const auto sents = wiki::split_sentences(para, lang);
          for (std::size_t i = 0; i < sents.size(); ++i) {
            ++sentences;
            punctuated += ends_terminal(sents[i]);
            terminal += ends_terminal(sents[i]) || i + 1 == sents.size();
          }
        }
      } catch (const std::exception&) {
        ++crashes;
      }
      if (pages == kParserPages && source != "synthetic") break;
    }
    pages_seen = stream.pages_seen();
  } catch (const std::exception& e) {
    return {false, std::string("reader failed: ") + e.what()};
  }
  // The tag-scan oracle needs the full document, so it runs only when the
  // whole file was read.
  std::string oracle_note;
  bool counts_ok = true;
  if (source == "synthetic" || pages < kParserPages) {
    const auto tally = oracle::tally_pages(decompressed(dump));
    counts_ok = tally.pages == pages_seen && tally.articles == pages;
    oracle_note = ", oracle " + std::to_string(tally.articles) + "/" + std::to_string(tally.pages) + " vs reader " +
                  std::to_string(pages) + "/" + std::to_string(pages_seen);
  } else {
    oracle_note = ", oracle skipped (slice truncated)";
  }
  const double frac = sentences ? static_cast<double>(terminal) / static_cast<double>(sentences) : 0.0;
  return {crashes == 0 && counts_ok && frac >= kMinTerminalFraction && pages >= std::min<std::size_t>(kParserPages, pages_seen),
          source + ": " + std::to_string(pages) + " pages, " + std::to_string(sentences) + " sentences, " +
              fmt(100.0 * frac, 2) + "% terminal or paragraph-final (min 95%; " +
              fmt(sentences ? 100.0 * punctuated / sentences : 0.0, 2) + "% punctuated), " + std::to_string(crashes) +
              " crashes" + oracle_note};
}

// ---------------------------------------------------------------------------
// Stats merge

bool close(const std::optional<double>& a, const std::optional<double>& b, double& worst) {
  if (a.has_value() != b.has_value()) return false;
  if (a) worst = std::max(worst, std::abs(*a - *b));
  return true;
}

Outcome stats_merge() {
  Rng rng(derive_seed(3, "acceptance/stats"));
  const auto records = testing::random_records(rng, 400);
  const std::vector<std::string> langs = kLanguages;
  const auto whole = metrics::compute_stats(records, langs);
  double worst = 0.0;
  std::size_t shape_errors = 0;
  for (std::size_t t = 0; t < kMergePartitions; ++t) {
    std::vector<ClaimRecord> a, b;
    const auto bias = 1 + rng.below(9);  // uneven splits, sometimes nearly empty
    for (const auto& r : records) (rng.below(10) < bias ? a : b).push_back(r);
    const auto sa = metrics::compute_stats(a, langs), sb = metrics::compute_stats(b, langs);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      const auto m = metrics::merge_stats(sa[i], sb[i]);
      const auto& w = whole[i];
      bool ok = m.language == w.language && m.cls == w.cls && m.count == w.count;
      ok = ok && close(m.words_mu, w.words_mu, worst) && close(m.words_sd, w.words_sd, worst) &&
           close(m.mean_self_contained, w.mean_self_contained, worst) && close(m.mean_support, w.mean_support, worst) &&
           close(m.mean_objective, w.mean_objective, worst) && close(m.mean_quality, w.mean_quality, worst) &&
           close(m.mean_bleu4, w.mean_bleu4, worst) && close(m.mean_rouge_l, w.mean_rouge_l, worst) &&
           close(m.mean_meteor, w.mean_meteor, worst);
      shape_errors += !ok;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", worst);
  return {shape_errors == 0 && worst <= kMergeTolerance,
          std::to_string(kMergePartitions) + " partitions x " + std::to_string(whole.size()) + " groups, max |diff| " +
              buf + " (tol 1e-9), " + std::to_string(shape_errors) + " count/shape mismatches"};
}

// ---------------------------------------------------------------------------
// Human-evaluation convergence

// Fills the rating columns of exported sheets so that every aspect averages
// to `means[aspect]` (one decimal) over ten claims per rater.
void fill_sheet(const fs::path& sheet, const std::array<double, 3>& means) {
  std::istringstream in(slurp(sheet));
  std::string line, out;
  std::getline(in, line);
  out = line + "\n";
  int row = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find('\t', start)) != std::string::npos; start = pos + 1) {
      cols.push_back(line.substr(start, pos - start));
    }
    cols.push_back(line.substr(start));
    for (int a = 0; a < 3; ++a) {
      const int tenths = static_cast<int>(std::lround((means[a] - 4.0) * 10));  // rows scored 5 out of 10
      cols[5 + a] = row % 10 < tenths ? "5" : "4";
    }
    cols[8] = "yes";
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "\t" : "") + cols[i];
    out += "\n";
    ++row;
  }
  std::ofstream(sheet, std::ios::binary) << out;
}

Outcome convergence(const fs::path& work) {
  Rng rng(derive_seed(5, "acceptance/review"));
  auto records = testing::random_records(rng, 200);
  for (auto& r : records) {
    if (r.judgment) r.status = RecordStatus::PassedNliFilter;
  }
  const auto sample = humaneval::sample_for_review(records, 10, 17);
  if (sample.size() != 30) return {false, "sample has " + std::to_string(sample.size()) + " rows"};

  struct Scenario {
    std::array<double, 3> means;
    bool expected;
  };
  const std::vector<Scenario> scenarios = {
      {{4.0, 4.0, 4.0}, false}, {{4.1, 4.1, 4.1}, true}, {{4.0, 4.1, 4.1}, false},
      {{4.1, 4.0, 4.1}, false}, {{4.1, 4.1, 4.0}, false},
  };
  std::size_t right = 0;
  std::string detail;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto dir = work / ("review" + std::to_string(i));
    fs::create_directories(dir);
    const auto sheets = humaneval::export_review_sheets(sample, dir);
    for (const auto& s : sheets) fill_sheet(s, scenarios[i].means);
    const auto ingested = humaneval::ingest_ratings(sheets);
    const auto report = humaneval::check_convergence(ingested.ratings, 4.0);
    const bool ok = ingested.errors.empty() && ingested.ratings.size() == 60 &&
                    report.converged == scenarios[i].expected;
    right += ok;
    detail += "{" + fmt(scenarios[i].means[0], 1) + "," + fmt(scenarios[i].means[1], 1) + "," +
              fmt(scenarios[i].means[2], 1) + "}->" + (report.converged ? "yes" : "no") + " ";
  }
  return {right == scenarios.size(), detail + "(threshold strictly > 4.0)"};
}

}  // namespace

int main() {
  testing::TempDir work("synfact-acceptance");
  int failures = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  };

  DeterminismResult det;
  report("end-to-end determinism", [&] {
    det = determinism(work.path());
    return det.determinism;
  });
  report("filter-rule exactness", filter_rules);
  report("subset property", [&] { return subset(det.outputs, work.path()); });
  report("metric oracles", metric_oracles);
  report("similarity ordering by class", similarity_pattern);
  report("prompt fidelity", prompt_fidelity);
  report("parser robustness", [&] { return parser_robustness(work.path()); });
  report("stats merge identity", stats_merge);
  report("human-eval convergence", [&] { return convergence(work.path()); });

  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << 9 - failures << "/9)" << std::endl;
  return failures ? 1 : 0;
}
