// Copyright 2026 The QX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QX_ROCCHIO_HPP_
#define QX_ROCCHIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qx/embedding.hpp"
#include "qx/error.hpp"
#include "qx/parallel.hpp"
#include "qx/scoring.hpp"
#include "qx/trial.hpp"

namespace qx {

enum class Direction { one_sided, bidirectional };

// How the two directional scores of a bidirectional trial are combined:
// either the arithmetic mean of "expanded enroll vs raw test" and "expanded
// test vs raw enroll", or the cosine of the two expanded vectors.
enum class BidiRule { mean_of_directions, expanded_vs_expanded };

struct QEParams {
  double alpha = 1.0;  // weight of the original query vector
  double beta = 0.0;   // weight of the relevant-neighbor centroid
  double gamma = 0.0;  // weight of the non-relevant centroid (subtracted)
  std::uint32_t top_n = 0;  // size of the pseudo-relevant set
  Direction direction = Direction::one_sided;
  BidiRule bidi_rule = BidiRule::mean_of_directions;
  // When set, the other utterance of the trial is removed from the neighbor
  // ranking before the feedback sets are selected.
  bool exclude_trial_partner = false;
};

inline void check_params(const QEParams& p) {
  if (!std::isfinite(p.alpha) || p.alpha < 0.0)
    throw Error("alpha must be finite and >= 0");
  if (!std::isfinite(p.beta) || p.beta < 0.0)
    throw Error("beta must be finite and >= 0");
  if (!std::isfinite(p.gamma) || p.gamma < 0.0)
    throw Error("gamma must be finite and >= 0");
}

inline std::string describe(const QEParams& p) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "qe(alpha=%g,beta=%g,gamma=%g,top_n=%u,%s%s%s)",
                p.alpha, p.beta, p.gamma, p.top_n,
                p.direction == Direction::bidirectional ? "bidirectional"
                                                        : "one_sided",
                p.direction == Direction::bidirectional
                    ? (p.bidi_rule == BidiRule::mean_of_directions
                           ? ",mean_of_directions"
                           : ",expanded_vs_expanded")
                    : "",
                p.exclude_trial_partner ? ",exclude_trial_partner" : "");
  return buf;
}

// Pseudo-feedback partition of a neighbor ranking: the top_n best-scoring
// neighbors are treated as same-speaker (relevant), everything else as
// different-speaker (non-relevant).  Indices refer to the embedding set.
struct FeedbackSets {
  std::vector<std::uint32_t> relevant;
  std::vector<std::uint32_t> nonrelevant;
};

inline FeedbackSets select_feedback_sets(const NeighborRanking& ranking,
                                         std::uint32_t top_n) {
  const std::size_t n = ranking.neighbors.size();
  if (top_n > n)
    throw Error("top_n (" + std::to_string(top_n) +
                ") exceeds the number of available neighbors (" +
                std::to_string(n) + ")");
  FeedbackSets fb;
  fb.relevant.reserve(top_n);
  fb.nonrelevant.reserve(n - top_n);
  for (std::size_t k = 0; k < n; ++k) {
    (k < top_n ? fb.relevant : fb.nonrelevant)
        .push_back(ranking.neighbors[k].first);
  }
  return fb;
}

// The Rocchio update: the query is replaced by
//
//   alpha * query + (beta / |R|) * sum(R) - (gamma / |N|) * sum(N)
//
// where R and N are the relevant and non-relevant vector sets.  An empty set
// contributes the zero vector.  The result is not re-normalized (cosine
// scoring is scale invariant).
inline std::vector<double> rocchio_expand(
    std::span<const double> query,
    const std::vector<std::span<const double>>& relevant,
    const std::vector<std::span<const double>>& nonrelevant,
    const QEParams& params) {
  check_params(params);
  const std::size_t d = query.size();
  std::vector<double> expanded(d, 0.0);
  if (params.alpha != 0.0)
    for (std::size_t k = 0; k < d; ++k) expanded[k] = params.alpha * query[k];

  if (params.beta != 0.0 && !relevant.empty()) {
    std::vector<double> sum(d, 0.0);
    for (auto v : relevant) {
      if (v.size() != d) throw Error("rocchio_expand: dimension mismatch in relevant set");
      for (std::size_t k = 0; k < d; ++k) sum[k] += v[k];
    }
    const double w = params.beta / static_cast<double>(relevant.size());
    for (std::size_t k = 0; k < d; ++k) expanded[k] += w * sum[k];
  }
  if (params.gamma != 0.0 && !nonrelevant.empty()) {
    std::vector<double> sum(d, 0.0);
    for (auto v : nonrelevant) {
      if (v.size() != d) throw Error("rocchio_expand: dimension mismatch in non-relevant set");
      for (std::size_t k = 0; k < d; ++k) sum[k] += v[k];
    }
    const double w = params.gamma / static_cast<double>(nonrelevant.size());
    for (std::size_t k = 0; k < d; ++k) expanded[k] -= w * sum[k];
  }

  for (double x : expanded)
    if (!std::isfinite(x)) throw Error("rocchio_expand: non-finite result");
  return expanded;
}

// Lazily built per-utterance neighbor rankings over one all-pairs structure.
// ensure() prefills slots in parallel; after that, get() is safe for
// concurrent readers.
class RankingCache {
 public:
  RankingCache(const EmbeddingSet& set, const AllPairsScores& pairs)
      : set_(&set), pairs_(&pairs), slots_(set.size()) {}

  const NeighborRanking& get(std::uint32_t index) const {
    if (index >= slots_.size()) throw Error("ranking cache: index out of range");
    std::lock_guard<std::mutex> lock(mu_);
    if (!slots_[index])
      slots_[index] = std::make_unique<NeighborRanking>(
          rank_neighbors(*pairs_, *set_, index));
    return *slots_[index];
  }

  void ensure(const std::vector<std::uint32_t>& indices, unsigned threads = 1) {
    std::vector<std::uint32_t> missing;
    for (auto i : indices) {
      if (i >= slots_.size()) throw Error("ranking cache: index out of range");
      if (!slots_[i]) missing.push_back(i);
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    parallel_for(missing.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k)
        slots_[missing[k]] = std::make_unique<NeighborRanking>(
            rank_neighbors(*pairs_, *set_, missing[k]));
    });
  }

 private:
  const EmbeddingSet* set_;
  const AllPairsScores* pairs_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<NeighborRanking>> slots_;
};

namespace detail {

constexpr std::uint32_t kNoPartner = 0xffffffffu;

// Expands one utterance against its neighbor ranking and returns the
// expanded vector.  `partner` is removed from the ranking first when the
// params ask for it.
inline std::vector<double> expand_utterance(const EmbeddingSet& set,
                                            const RankingCache& rankings,
                                            std::uint32_t query,
                                            std::uint32_t partner,
                                            const QEParams& params) {
  const NeighborRanking& full = rankings.get(query);
  const NeighborRanking* ranking = &full;
  NeighborRanking filtered;
  if (params.exclude_trial_partner && partner != kNoPartner &&
      partner != query) {
    filtered.query = full.query;
    filtered.neighbors.reserve(full.neighbors.size());
    for (const auto& nb : full.neighbors)
      if (nb.first != partner) filtered.neighbors.push_back(nb);
    ranking = &filtered;
  }

  FeedbackSets fb = select_feedback_sets(*ranking, params.top_n);
  std::vector<std::span<const double>> rel;
  rel.reserve(fb.relevant.size());
  for (auto i : fb.relevant) rel.push_back(set.vec(i));
  std::vector<std::span<const double>> nonrel;
  if (params.gamma != 0.0) {
    nonrel.reserve(fb.nonrelevant.size());
    for (auto i : fb.nonrelevant) nonrel.push_back(set.vec(i));
  }

  std::vector<double> expanded =
      rocchio_expand(set.vec(query), rel, nonrel, params);
  if (is_zero_vector(expanded))
    throw Error("degenerate expansion: the weight combination annihilated the "
                "query vector for id '" + set.id(query) + "'");
  return expanded;
}

inline std::pair<std::uint32_t, std::uint32_t> resolve_trial(
    const EmbeddingSet& set, const TrialPair& trial, std::size_t index) {
  auto e = set.find(trial.enroll_id);
  if (!e)
    throw Error("trial " + std::to_string(index) + ": unknown enroll id '" +
                trial.enroll_id + "'");
  auto t = set.find(trial.test_id);
  if (!t)
    throw Error("trial " + std::to_string(index) + ": unknown test id '" +
                trial.test_id + "'");
  return {*e, *t};
}

inline double directional_score(const EmbeddingSet& set,
                                const RankingCache& rankings,
                                std::uint32_t from, std::uint32_t to,
                                const QEParams& params) {
  std::vector<double> expanded =
      expand_utterance(set, rankings, from, to, params);
  return cosine(expanded, set.vec(to));
}

}  // namespace detail

// One-sided expansion: the enroll utterance is expanded, the test vector is
// left as-is.
inline double qe_score_trial(const EmbeddingSet& set,
                             const RankingCache& rankings,
                             const TrialPair& trial, const QEParams& params,
                             std::size_t trial_index = 0) {
  auto [e, t] = detail::resolve_trial(set, trial, trial_index);
  return detail::directional_score(set, rankings, e, t, params);
}

inline double bidirectional_qe_score(const EmbeddingSet& set,
                                     const RankingCache& rankings,
                                     const TrialPair& trial,
                                     const QEParams& params,
                                     std::size_t trial_index = 0) {
  auto [e, t] = detail::resolve_trial(set, trial, trial_index);
  if (params.bidi_rule == BidiRule::mean_of_directions) {
    const double et = detail::directional_score(set, rankings, e, t, params);
    const double te = detail::directional_score(set, rankings, t, e, params);
    return 0.5 * (et + te);
  }
  std::vector<double> qe = detail::expand_utterance(set, rankings, e, t, params);
  std::vector<double> qt = detail::expand_utterance(set, rankings, t, e, params);
  return cosine(qe, qt);
}

// Scores every trial with query expansion.  Rankings are derived once from
// the baseline all-pairs scores and reused for every trial (single expansion
// round, no re-ranking).  Trials can be processed in parallel; each result is
// written to its positional slot, so the output does not depend on
// scheduling.
inline ScoreSet qe_score_all(const EmbeddingSet& set, RankingCache& rankings,
                             const TrialList& trials, const QEParams& params,
                             unsigned threads = 1,
                             std::vector<std::string>* warnings = nullptr) {
  check_params(params);
  ScoreSet out;
  out.system = describe(params);
  out.trials = trials;
  out.scores.resize(trials.size());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> resolved(trials.size());
  std::vector<std::uint32_t> needed;
  needed.reserve(trials.size() * 2);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    resolved[i] = detail::resolve_trial(set, trials[i], i);
    if (resolved[i].first == resolved[i].second && warnings)
      warnings->push_back("trial " + std::to_string(i) +
                          ": degenerate self-trial for id '" +
                          trials[i].enroll_id + "'");
    needed.push_back(resolved[i].first);
    if (params.direction == Direction::bidirectional)
      needed.push_back(resolved[i].second);
  }
  rankings.ensure(needed, threads);

  parallel_for(trials.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (params.direction == Direction::bidirectional)
        out.scores[i] = bidirectional_qe_score(set, rankings, trials[i], params, i);
      else
        out.scores[i] = qe_score_trial(set, rankings, trials[i], params, i);
    }
  });
  return out;
}

// Convenience overload that builds the all-pairs structure itself.
inline ScoreSet qe_score_all(const EmbeddingSet& set, const TrialList& trials,
                             const QEParams& params, unsigned threads = 1,
                             std::vector<std::string>* warnings = nullptr) {
  AllPairsScores pairs = AllPairsScores::compute(set, threads);
  RankingCache rankings(set, pairs);
  return qe_score_all(set, rankings, trials, params, threads, warnings);
}

}  // namespace qx

#endif  // QX_ROCCHIO_HPP_
