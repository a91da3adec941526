#include "synfact/humaneval/review.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "synfact/common/errors.hpp"
#include "synfact/common/files.hpp"
#include "synfact/common/rng.hpp"

namespace synfact::humaneval {

namespace fs = std::filesystem;

std::vector<ClaimRecord> sample_for_review(const std::vector<ClaimRecord>& records, std::size_t per_class,
                                           std::uint64_t seed) {
  std::vector<ClaimRecord> out;
  for (const auto cls : kAllClasses) {
    std::vector<const ClaimRecord*> pool;
    for (const auto& r : records) {
      if (r.status == RecordStatus::PassedNliFilter && r.target_class == cls) pool.push_back(&r);
    }
    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->claim_id < b->claim_id; });
    Rng rng(derive_seed(seed, "review/" + std::string(to_string(cls))));
    for (const auto i : rng.sample_indices(pool.size(), std::min(per_class, pool.size()))) out.push_back(*pool[i]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.claim_id < b.claim_id; });
  return out;
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    switch (text[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default: out += '\\'; out += text[i];
    }
  }
  return out;
}

std::vector<fs::path> export_review_sheets(const std::vector<ClaimRecord>& sample, const fs::path& dir,
                                           const std::vector<std::string>& raters) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  for (const auto& rater : raters) {
    std::string out;
    for (std::size_t i = 0; i < kSheetColumns.size(); ++i) {
      if (i) out += '\t';
      out += kSheetColumns[i];
    }
    out += '\n';
    for (const auto& r : sample) {
      const std::string claim = r.judgment ? r.judgment->claim : std::string();
      out += escape_field(r.claim_id) + '\t' + escape_field(r.language) + '\t' +
             std::string(to_string(r.target_class)) + '\t' + escape_field(r.source_text) + '\t' +
             escape_field(claim) + "\t\t\t\t\t" + escape_field(rater) + '\n';
    }
    auto path = dir / ("review_" + rater + ".tsv");
    write_file_atomic(path, out);
    paths.push_back(std::move(path));
  }
  return paths;
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cells.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cells;
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \r");
  if (a == std::string_view::npos) return {};
  return std::string(s.substr(a, s.find_last_not_of(" \r") - a + 1));
}

int parse_score(const std::string& cell, std::string_view column) {
  int v = 0;
  if (cell.size() != 1 || cell[0] < '1' || cell[0] > '5') {
    throw ParseFailure(std::string(column) + " must be an integer 1-5, got '" + cell + "'");
  }
  v = cell[0] - '0';
  return v;
}

bool parse_yes_no(std::string cell) {
  std::transform(cell.begin(), cell.end(), cell.begin(), [](unsigned char c) { return std::tolower(c); });
  if (cell == "yes" || cell == "y" || cell == "1" || cell == "true") return true;
  if (cell == "no" || cell == "n" || cell == "0" || cell == "false") return false;
  throw ParseFailure("label_correct must be yes/no, got '" + cell + "'");
}

}  // namespace

IngestResult ingest_ratings(const std::vector<fs::path>& sheets) {
  IngestResult result;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& path : sheets) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open review sheet " + path.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty review sheet");
    ++lineno;
    const auto header = split_tabs(trim(line));
    if (header.size() != kSheetColumns.size() || !std::equal(header.begin(), header.end(), kSheetColumns.begin())) {
      throw ConfigError(path.string() + ": unexpected review sheet header");
    }
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto cells = split_tabs(line);
      if (cells.size() != kSheetColumns.size()) {
        result.errors.push_back({path.string(), lineno,
                                 "expected " + std::to_string(kSheetColumns.size()) + " columns, got " +
                                     std::to_string(cells.size())});
        continue;
      }
      const auto q = trim(cells[5]), g = trim(cells[6]), s = trim(cells[7]), l = trim(cells[8]);
      if (q.empty() && g.empty() && s.empty() && l.empty()) {
        ++result.blank_rows;
        continue;
      }
      Rating r;
      r.claim_id = unescape_field(cells[0]);
      r.target_class = cells[2];
      r.rater_id = unescape_field(trim(cells[9]));
      try {
        if (r.claim_id.empty()) throw ParseFailure("empty claim_id");
        if (r.rater_id.empty()) throw ParseFailure("empty rater_id");
        r.overall_quality = parse_score(q, kSheetColumns[5]);
        r.grammaticality = parse_score(g, kSheetColumns[6]);
        r.semantic_relation = parse_score(s, kSheetColumns[7]);
        r.label_correct = parse_yes_no(l);
      } catch (const ParseFailure& e) {
        result.errors.push_back({path.string(), lineno, e.what()});
        continue;
      }
      if (!seen.emplace(r.claim_id, r.rater_id).second) {
        throw IntegrityError(path.string() + ":" + std::to_string(lineno) + ": duplicate rating of " + r.claim_id +
                             " by " + r.rater_id);
      }
      result.ratings.push_back(std::move(r));
    }
  }
  return result;
}

namespace {

AspectMeans means_of(const std::vector<const Rating*>& ratings) {
  AspectMeans m;
  if (ratings.empty()) return m;
  double q = 0, g = 0, s = 0, l = 0;
  for (const auto* r : ratings) {
    q += r->overall_quality;
    g += r->grammaticality;
    s += r->semantic_relation;
    l += r->label_correct ? 1 : 0;
  }
  const double n = static_cast<double>(ratings.size());
  m.overall_quality = q / n;
  m.grammaticality = g / n;
  m.semantic_relation = s / n;
  m.label_correct = l / n;
  return m;
}

nlohmann::json means_json(const AspectMeans& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"overall_quality", opt(m.overall_quality)},
          {"grammaticality", opt(m.grammaticality)},
          {"semantic_relation", opt(m.semantic_relation)},
          {"label_correct", opt(m.label_correct)}};
}

}  // namespace

ConvergenceReport check_convergence(const std::vector<Rating>& ratings, double threshold) {
  ConvergenceReport rep;
  rep.threshold = threshold;
  rep.rating_count = ratings.size();
  std::vector<const Rating*> all;
  std::map<std::string, std::vector<const Rating*>> by_class;
  for (const auto& r : ratings) {
    all.push_back(&r);
    by_class[r.target_class].push_back(&r);
  }
  rep.overall = means_of(all);
  for (const auto& [cls, rs] : by_class) rep.by_class[cls] = means_of(rs);
  if (ratings.empty()) {
    rep.failing = {"overall_quality", "grammaticality", "semantic_relation"};
    return rep;
  }
  const std::pair<const char*, double> aspects[] = {{"overall_quality", *rep.overall.overall_quality},
                                                    {"grammaticality", *rep.overall.grammaticality},
                                                    {"semantic_relation", *rep.overall.semantic_relation}};
  for (const auto& [name, mean] : aspects) {
    if (!(mean > threshold)) rep.failing.emplace_back(name);
  }
  rep.converged = rep.failing.empty();
  return rep;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json by_class = nlohmann::json::object();
  for (const auto& [cls, m] : report.by_class) by_class[cls] = means_json(m);
  return {{"rating_count", report.rating_count}, {"threshold", report.threshold},
          {"converged", report.converged},       {"failing", report.failing},
          {"overall", means_json(report.overall)}, {"by_class", by_class}};
}

}  // namespace synfact::humaneval
