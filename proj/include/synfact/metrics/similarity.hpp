#pragma once

#include <span>
#include <string>
#include <string_view>

#include "synfact/metrics/tokenize.hpp"

namespace synfact::metrics {

using Tokens = std::span<const std::string>;

/// Sentence-level BLEU-4: uniform weights over orders 1-4, clipped counts,
/// add-one smoothing on orders 2-4 (order 1 unsmoothed), brevity penalty
/// exp(1 - r/c) when the candidate is shorter. 0 for an empty candidate or no
/// unigram overlap.
double bleu4(Tokens reference, Tokens candidate);

/// ROUGE-L F1 over the longest common subsequence; 0 if either side is empty.
double rouge_l(Tokens reference, Tokens candidate);

/// METEOR restricted to exact unigram matches (no stemming or synonyms).
///
/// The k-th occurrence of a word in the candidate aligns to its k-th
/// occurrence in the reference, which yields the multiset match count m.
/// Fmean = 10PR/(R+9P), penalty = 0.5 (chunks/m)^3, score = Fmean (1 - penalty),
/// where a chunk is a maximal run of matches adjacent in both sequences.
double meteor(Tokens reference, Tokens candidate);

struct SimilarityScores {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
};

/// All three metrics with `source` as reference and `claim` as candidate.
SimilarityScores score_pair(std::string_view source, std::string_view claim, std::string_view language);

}  // namespace synfact::metrics
