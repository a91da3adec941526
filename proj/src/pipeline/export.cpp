#include "synfact/pipeline/export.hpp"

#include <algorithm>
#include <cstdio>

#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"

namespace synfact::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Variant v) noexcept {
  return v == Variant::MnliFiltering ? "mnli_filtering" : "no_mnli_filtering";
}

Variant parse_variant(std::string_view text) {
  if (text == "mnli_filtering" || text == "mnli") return Variant::MnliFiltering;
  if (text == "no_mnli_filtering" || text == "no_mnli") return Variant::NoMnliFiltering;
  throw ConfigError("unknown variant '" + std::string(text) + "'");
}

bool in_variant(const ClaimRecord& record, Variant v) noexcept {
  return v == Variant::MnliFiltering ? record.status == RecordStatus::PassedNliFilter : record.passed_llm_filter();
}

json to_json(const Manifest& m) {
  json counts = json::object();
  for (const auto& [lang, c] : m.counts) {
    json row = json::object();
    for (const auto cls : kAllClasses) row[std::string(to_string(cls))] = c[static_cast<std::size_t>(cls)];
    counts[lang] = row;
  }
  return {{"schema_version", m.schema_version},
          {"variant", std::string(to_string(m.variant))},
          {"counts", counts},
          {"total", m.total}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion) {
      throw ConfigError("unsupported manifest schema_version " + std::to_string(m.schema_version));
    }
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.total = j.at("total").get<std::size_t>();
    std::size_t sum = 0;
    for (auto it = j.at("counts").begin(); it != j.at("counts").end(); ++it) {
      ClassCounts c{};
      for (const auto cls : kAllClasses) {
        c[static_cast<std::size_t>(cls)] = it->value(std::string(to_string(cls)), std::size_t{0});
        sum += c[static_cast<std::size_t>(cls)];
      }
      m.counts[it.key()] = c;
    }
    if (sum != m.total) throw IntegrityError("manifest total does not match its cells");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest read_manifest(const fs::path& path) {
  const auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("manifest " + path.string() + " is not valid JSON");
  return manifest_from_json(j);
}

std::string export_line(const ClaimRecord& record) {
  json j = record;
  j["schema_version"] = kSchemaVersion;
  return j.dump();
}

ExportedFiles export_dataset(const std::vector<ClaimRecord>& records, Variant variant, const fs::path& dir,
                             const std::vector<std::string>& languages) {
  std::vector<const ClaimRecord*> selected;
  for (const auto& r : records) {
    if (in_variant(r, variant)) selected.push_back(&r);
  }
  std::sort(selected.begin(), selected.end(), [](auto* a, auto* b) { return a->claim_id < b->claim_id; });
  for (std::size_t i = 1; i < selected.size(); ++i) {
    if (selected[i]->claim_id == selected[i - 1]->claim_id) {
      throw IntegrityError("duplicate claim_id " + selected[i]->claim_id + " in export");
    }
  }

  Manifest m;
  m.variant = variant;
  for (const auto& lang : languages) m.counts[lang] = ClassCounts{};
  std::string data;
  for (const auto* r : selected) {
    data += export_line(*r);
    data += '\n';
    ++m.counts[r->language][static_cast<std::size_t>(r->target_class)];
    ++m.total;
  }

  fs::create_directories(dir);
  ExportedFiles out;
  out.data = dir / (std::string(to_string(variant)) + ".jsonl");
  out.manifest = dir / (std::string(to_string(variant)) + ".manifest.json");
  write_file_atomic(out.data, data);
  write_file_atomic(out.manifest, to_json(m).dump(2) + "\n");
  out.contents = std::move(m);
  return out;
}

std::vector<ClaimRecord> load_dataset(const fs::path& path) {
  std::vector<ClaimRecord> out;
  std::size_t lineno = 0;
  for_each_line(path, [&](std::string_view line) {
    ++lineno;
    if (line.empty()) return;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": invalid JSON");
    if (j.value("schema_version", 0) != kSchemaVersion) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unsupported schema_version");
    }
    try {
      out.push_back(j.get<ClaimRecord>());
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

std::vector<DistributionRow> report_distribution(const Manifest& no_mnli, const Manifest* mnli) {
  if (no_mnli.variant != Variant::NoMnliFiltering) throw IntegrityError("first manifest is not no_mnli_filtering");
  if (mnli && mnli->variant != Variant::MnliFiltering) throw IntegrityError("second manifest is not mnli_filtering");

  std::map<std::string, DistributionRow> rows;
  for (const auto& [lang, c] : no_mnli.counts) {
    rows[lang].language = lang;
    rows[lang].no_mnli = c;
  }
  if (mnli) {
    for (auto& [lang, row] : rows) row.mnli = ClassCounts{};
    for (const auto& [lang, c] : mnli->counts) {
      auto& row = rows[lang];
      row.language = lang;
      row.mnli = c;
    }
    for (const auto& [lang, row] : rows) {
      for (const auto cls : kAllClasses) {
        const auto k = static_cast<std::size_t>(cls);
        if ((*row.mnli)[k] > row.no_mnli[k]) {
          throw IntegrityError("subset violation for " + lang + "/" + std::string(to_string(cls)) + ": mnli " +
                               std::to_string((*row.mnli)[k]) + " > no_mnli " + std::to_string(row.no_mnli[k]));
        }
      }
    }
  }
  std::vector<DistributionRow> out;
  for (auto& [lang, row] : rows) out.push_back(std::move(row));
  return out;
}

std::string format_distribution(const std::vector<DistributionRow>& rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %-18s %10s %10s %10s %10s\n", "lang", "variant", "supports", "refutes",
                "not-info", "total");
  out += buf;
  ClassCounts sum_no{}, sum_m{};
  bool any_mnli = false;
  auto line = [&](const std::string& lang, std::string_view variant, const ClassCounts& c) {
    std::snprintf(buf, sizeof buf, "%-8s %-18s %10zu %10zu %10zu %10zu\n", lang.c_str(),
                  std::string(variant).c_str(), c[0], c[1], c[2], c[0] + c[1] + c[2]);
    out += buf;
  };
  for (const auto& row : rows) {
    line(row.language, "no_mnli_filtering", row.no_mnli);
    for (std::size_t k = 0; k < 3; ++k) sum_no[k] += row.no_mnli[k];
    if (row.mnli) {
      any_mnli = true;
      line(row.language, "mnli_filtering", *row.mnli);
      for (std::size_t k = 0; k < 3; ++k) sum_m[k] += (*row.mnli)[k];
    }
  }
  line("all", "no_mnli_filtering", sum_no);
  if (any_mnli) line("all", "mnli_filtering", sum_m);
  return out;
}

json to_json(const std::vector<DistributionRow>& rows) {
  json out = json::array();
  auto counts = [](const ClassCounts& c) {
    return json{{"supports", c[0]}, {"refutes", c[1]}, {"not-info", c[2]}, {"total", c[0] + c[1] + c[2]}};
  };
  for (const auto& r : rows) {
    out.push_back({{"language", r.language},
                   {"no_mnli_filtering", counts(r.no_mnli)},
                   {"mnli_filtering", r.mnli ? counts(*r.mnli) : json(nullptr)}});
  }
  return out;
}

}  // namespace synfact::pipeline
