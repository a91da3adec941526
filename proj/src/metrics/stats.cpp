#include "synfact/metrics/stats.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace synfact::metrics {

void GroupAccumulator::add(int words, const GenerationJudgment& j, const SimilarityScores& sim) {
  ++n_;
  const double nd = static_cast<double>(n_);
  const double delta = words - words_mean_;
  words_mean_ += delta / nd;
  words_m2_ += delta * (words - words_mean_);
  const std::array<double, kMeans> values = {static_cast<double>(j.self_contained),
                                             static_cast<double>(j.supported_score),
                                             static_cast<double>(j.objective),
                                             static_cast<double>(j.overall_quality),
                                             sim.bleu4,
                                             sim.rouge_l,
                                             sim.meteor};
  for (std::size_t k = 0; k < kMeans; ++k) means_[k] += (values[k] - means_[k]) / nd;
}

void GroupAccumulator::merge(const GroupAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.words_mean_ - words_mean_;
  words_mean_ = (na * words_mean_ + nb * other.words_mean_) / n;
  words_m2_ += other.words_m2_ + delta * delta * na * nb / n;
  for (std::size_t k = 0; k < kMeans; ++k) means_[k] = (na * means_[k] + nb * other.means_[k]) / n;
  n_ += other.n_;
}

DatasetStats GroupAccumulator::finish(std::string language, ClaimClass cls) const {
  DatasetStats s;
  s.language = std::move(language);
  s.cls = cls;
  s.count = n_;
  if (n_ == 0) return s;
  s.words_mu = words_mean_;
  s.words_sd = std::sqrt(std::max(0.0, words_m2_ / static_cast<double>(n_)));
  s.mean_self_contained = means_[0];
  s.mean_support = means_[1];
  s.mean_objective = means_[2];
  s.mean_quality = means_[3];
  s.mean_bleu4 = means_[4];
  s.mean_rouge_l = means_[5];
  s.mean_meteor = means_[6];
  return s;
}

GroupAccumulator GroupAccumulator::from_stats(const DatasetStats& s) {
  GroupAccumulator acc;
  acc.n_ = s.count;
  if (s.count == 0) return acc;
  acc.words_mean_ = s.words_mu.value_or(0.0);
  const double sd = s.words_sd.value_or(0.0);
  acc.words_m2_ = sd * sd * static_cast<double>(s.count);
  acc.means_ = {s.mean_self_contained.value_or(0.0), s.mean_support.value_or(0.0), s.mean_objective.value_or(0.0),
                s.mean_quality.value_or(0.0),        s.mean_bleu4.value_or(0.0),   s.mean_rouge_l.value_or(0.0),
                s.mean_meteor.value_or(0.0)};
  return acc;
}

std::vector<DatasetStats> compute_stats(std::span<const ClaimRecord> records, std::span<const std::string> languages) {
  std::set<std::string> langs(languages.begin(), languages.end());
  std::map<std::pair<std::string, int>, GroupAccumulator> groups;
  for (const auto& r : records) {
    langs.insert(r.language);
    if (!r.judgment) continue;
    const auto sim = score_pair(r.source_text, r.judgment->claim, r.language);
    groups[{r.language, static_cast<int>(r.target_class)}].add(r.word_count, *r.judgment, sim);
  }
  std::vector<DatasetStats> rows;
  for (const auto& lang : langs) {
    for (auto cls : kAllClasses) {
      const auto it = groups.find({lang, static_cast<int>(cls)});
      rows.push_back(it == groups.end() ? GroupAccumulator{}.finish(lang, cls) : it->second.finish(lang, cls));
    }
  }
  return rows;
}

DatasetStats merge_stats(const DatasetStats& a, const DatasetStats& b) {
  auto acc = GroupAccumulator::from_stats(a);
  acc.merge(GroupAccumulator::from_stats(b));
  return acc.finish(a.language, a.cls);
}

namespace {
std::string fmt(const std::optional<double>& v, const char* format) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, format, *v);
  return buf;
}
}  // namespace

std::string format_stats_tsv(std::span<const DatasetStats> rows) {
  std::string out =
      "language\tclass\tcount\twords_mu\twords_sd\tself-contained\tsupport\tobjective\tquality\tBLEU-4\tROUGE-L\tMETEOR\n";
  for (const auto& r : rows) {
    out += r.language;
    out += '\t';
    out += to_string(r.cls);
    out += '\t' + std::to_string(r.count);
    out += '\t' + fmt(r.words_mu, "%.2f");
    out += '\t' + fmt(r.words_sd, "%.2f");
    out += '\t' + fmt(r.mean_self_contained, "%.2f");
    out += '\t' + fmt(r.mean_support, "%.2f");
    out += '\t' + fmt(r.mean_objective, "%.2f");
    out += '\t' + fmt(r.mean_quality, "%.2f");
    out += '\t' + fmt(r.mean_bleu4, "%.4f");
    out += '\t' + fmt(r.mean_rouge_l, "%.4f");
    out += '\t' + fmt(r.mean_meteor, "%.4f");
    out += '\n';
  }
  return out;
}

void to_json(nlohmann::json& j, const DatasetStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"language", s.language},
                     {"class", to_string(s.cls)},
                     {"count", s.count},
                     {"words_mu", opt(s.words_mu)},
                     {"words_sd", opt(s.words_sd)},
                     {"self_contained", opt(s.mean_self_contained)},
                     {"support", opt(s.mean_support)},
                     {"objective", opt(s.mean_objective)},
                     {"quality", opt(s.mean_quality)},
                     {"bleu4", opt(s.mean_bleu4)},
                     {"rouge_l", opt(s.mean_rouge_l)},
                     {"meteor", opt(s.mean_meteor)}};
}

}  // namespace synfact::metrics
