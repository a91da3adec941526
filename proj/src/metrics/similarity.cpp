#include "synfact/metrics/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace synfact::metrics {

namespace {

struct SpanHash {
  std::size_t operator()(Tokens s) const noexcept {
    std::size_t h = 0;
    for (const auto& t : s) h = h * 1000003u ^ std::hash<std::string>{}(t);
    return h;
  }
};

struct SpanEq {
  bool operator()(Tokens a, Tokens b) const noexcept { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }
};

using NgramCounts = std::unordered_map<Tokens, int, SpanHash, SpanEq>;

NgramCounts count_ngrams(Tokens seq, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) ++counts[seq.subspan(i, n)];
  return counts;
}

}  // namespace

double bleu4(Tokens reference, Tokens candidate) {
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = count_ngrams(candidate, n);
    const auto ref = count_ngrams(reference, n);
    int matched = 0;
    for (const auto& [gram, count] : cand) {
      const auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    const int total = candidate.size() >= n ? static_cast<int>(candidate.size() - n + 1) : 0;
    double precision;
    if (n == 1) {
      if (matched == 0) return 0.0;
      precision = static_cast<double>(matched) / total;
    } else {
      precision = (matched + 1.0) / (total + 1.0);
    }
    log_sum += std::log(precision);
  }
  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum / 4.0), 0.0, 1.0);
}

double rouge_l(Tokens reference, Tokens candidate) {
  if (reference.empty() || candidate.empty()) return 0.0;
  // Two-row LCS table.
  std::vector<int> prev(candidate.size() + 1, 0), cur(candidate.size() + 1, 0);
  for (std::size_t i = 1; i <= reference.size(); ++i) {
    for (std::size_t j = 1; j <= candidate.size(); ++j) {
      cur[j] = reference[i - 1] == candidate[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const int lcs = prev[candidate.size()];
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

double meteor(Tokens reference, Tokens candidate) {
  if (reference.empty() || candidate.empty()) return 0.0;
  std::unordered_map<std::string_view, std::vector<std::size_t>> ref_positions;
  for (std::size_t j = 0; j < reference.size(); ++j) ref_positions[reference[j]].push_back(j);

  std::unordered_map<std::string_view, std::size_t> used;
  std::size_t matches = 0;
  std::size_t chunks = 0;
  bool prev_aligned = false;
  std::size_t prev_ref = 0;
  for (const auto& token : candidate) {
    const auto it = ref_positions.find(token);
    auto& k = used[token];
    if (it == ref_positions.end() || k >= it->second.size()) {
      prev_aligned = false;
      continue;
    }
    const std::size_t ref_pos = it->second[k++];
    ++matches;
    if (!(prev_aligned && ref_pos == prev_ref + 1)) ++chunks;
    prev_aligned = true;
    prev_ref = ref_pos;
  }
  if (matches == 0) return 0.0;
  const double p = static_cast<double>(matches) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(matches) / static_cast<double>(reference.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double frag = static_cast<double>(chunks) / static_cast<double>(matches);
  const double penalty = 0.5 * frag * frag * frag;
  return std::clamp(fmean * (1.0 - penalty), 0.0, 1.0);
}

SimilarityScores score_pair(std::string_view source, std::string_view claim, std::string_view language) {
  const auto ref = tokenize(source, language);
  const auto cand = tokenize(claim, language);
  return {bleu4(ref.tokens, cand.tokens), rouge_l(ref.tokens, cand.tokens), meteor(ref.tokens, cand.tokens)};
}

}  // namespace synfact::metrics
