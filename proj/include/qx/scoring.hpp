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

#ifndef QX_SCORING_HPP_
#define QX_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qx/embedding.hpp"
#include "qx/error.hpp"
#include "qx/parallel.hpp"
#include "qx/trial.hpp"

namespace qx {

// Cosine similarity in [-1, 1], clamped against rounding.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error("cosine: dimension mismatch (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// Cosine scores for every unordered pair of a set.  Each pair is computed
// exactly once; score(i, j) == score(j, i) holds bit-exact by construction.
//
// Two storage modes with identical semantics:
//   compute() stores the upper triangle, O(N^2/2) doubles;
//   lazy() stores nothing and recomputes scores on access, for sets whose
//   triangle does not fit in memory.
//
// The set must outlive the AllPairsScores built from it.
class AllPairsScores {
 public:
  static AllPairsScores compute(const EmbeddingSet& set, unsigned threads = 1) {
    AllPairsScores ap(set);
    const std::uint32_t n = ap.n_;
    ap.tri_.resize(static_cast<std::size_t>(n) * (n - 1) / 2);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t ii = static_cast<std::uint32_t>(i);
        double* out = ap.tri_.data() + ap.tri_offset(ii);
        for (std::uint32_t j = ii + 1; j < n; ++j)
          out[j - ii - 1] = ap.pair_score(ii, j);
      }
    });
    return ap;
  }

  static AllPairsScores lazy(const EmbeddingSet& set) {
    return AllPairsScores(set);
  }

  std::uint32_t size() const { return n_; }
  bool dense() const { return !tri_.empty(); }

  double score(std::uint32_t i, std::uint32_t j) const {
    if (i == j) throw Error("pair score requires two distinct indices");
    const auto [lo, hi] = std::minmax(i, j);
    if (dense()) return tri_[tri_offset(lo) + (hi - lo - 1)];
    return pair_score(lo, hi);
  }

  // Fills out[j] with score(i, j) for all j != i; out[i] is set to 0 and
  // carries no meaning.  out.size() must equal size().
  void row(std::uint32_t i, std::span<double> out) const {
    out[i] = 0.0;
    for (std::uint32_t j = 0; j < n_; ++j)
      if (j != i) out[j] = score(i, j);
  }

  std::span<const double> triangle() const { return tri_; }

 private:
  explicit AllPairsScores(const EmbeddingSet& set) : set_(&set), n_(set.size()) {
    if (n_ < 2) throw Error("all-pairs scoring requires at least 2 embeddings");
    norms_.resize(n_);
    for (std::uint32_t i = 0; i < n_; ++i) {
      double norm2 = 0.0;
      for (double x : set.vec(i)) norm2 += x * x;
      if (norm2 == 0.0)
        throw Error("all-pairs scoring: zero vector '" + set.id(i) + "'");
      if (!std::isfinite(norm2))
        throw Error("all-pairs scoring: non-finite vector '" + set.id(i) + "'");
      norms_[i] = std::sqrt(norm2);
    }
  }

  std::size_t tri_offset(std::uint32_t i) const {
    // first element of row i in the packed upper triangle
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i + 1) / 2;
  }

  double pair_score(std::uint32_t i, std::uint32_t j) const {
    auto a = set_->vec(i);
    auto b = set_->vec(j);
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    return std::clamp(dot / (norms_[i] * norms_[j]), -1.0, 1.0);
  }

  const EmbeddingSet* set_;
  std::uint32_t n_;
  std::vector<double> norms_;
  std::vector<double> tri_;  // empty in lazy mode
};

// Descending-sorted scores of one utterance against every other utterance of
// the set ("non-self").  Ties are broken by ascending lexicographic neighbor
// id so the ordering is deterministic.
struct NeighborRanking {
  std::uint32_t query = 0;                                // index into the set
  std::vector<std::pair<std::uint32_t, double>> neighbors;  // (index, score)
};

inline NeighborRanking rank_neighbors(const AllPairsScores& pairs,
                                      const EmbeddingSet& set,
                                      std::uint32_t query) {
  if (query >= pairs.size()) throw Error("rank_neighbors: index out of range");
  NeighborRanking r;
  r.query = query;
  r.neighbors.reserve(pairs.size() - 1);
  std::vector<double> scores(pairs.size());
  pairs.row(query, scores);
  for (std::uint32_t j = 0; j < pairs.size(); ++j)
    if (j != query) r.neighbors.emplace_back(j, scores[j]);
  std::sort(r.neighbors.begin(), r.neighbors.end(),
            [&set](const auto& x, const auto& y) {
              if (x.second != y.second) return x.second > y.second;
              return set.id(x.first) < set.id(y.first);
            });
  return r;
}

inline NeighborRanking rank_neighbors(const AllPairsScores& pairs,
                                      const EmbeddingSet& set,
                                      const std::string& query_id) {
  return rank_neighbors(pairs, set, set.require(query_id));
}

// Baseline trial scoring: cosine of the two embeddings of each trial.
// Self-trials are scored (cosine 1.0) but reported through `warnings`.
inline ScoreSet score_trials(const EmbeddingSet& set, const TrialList& trials,
                             std::vector<std::string>* warnings = nullptr) {
  if (set.size() < 2) throw Error("trial scoring requires at least 2 embeddings");
  ScoreSet out;
  out.system = "baseline";
  out.trials = trials;
  out.scores.resize(trials.size());
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialPair& tr = trials[t];
    auto e = set.find(tr.enroll_id);
    if (!e)
      throw Error("trial " + std::to_string(t) + ": unknown enroll id '" +
                  tr.enroll_id + "'");
    auto v = set.find(tr.test_id);
    if (!v)
      throw Error("trial " + std::to_string(t) + ": unknown test id '" +
                  tr.test_id + "'");
    if (*e == *v && warnings)
      warnings->push_back("trial " + std::to_string(t) +
                          ": degenerate self-trial for id '" + tr.enroll_id +
                          "'");
    out.scores[t] = cosine(set.vec(*e), set.vec(*v));
  }
  return out;
}

}  // namespace qx

#endif  // QX_SCORING_HPP_
