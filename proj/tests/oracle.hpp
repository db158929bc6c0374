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
//
// Naive reference implementations used as test oracles.  Everything here is
// recomputed from scratch on every call (no caching, no shared structures,
// no reuse of the library code paths under test) and kept deliberately dumb.

#ifndef QX_TESTS_ORACLE_HPP_
#define QX_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qx/embedding.hpp"
#include "qx/metrics.hpp"

namespace oracle {

inline std::vector<double> vec_of(const qx::EmbeddingSet& set, std::uint32_t i) {
  auto v = set.vec(i);
  return {v.begin(), v.end()};
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

// Neighbor indices of `query`, best score first, ties by ascending id.
inline std::vector<std::uint32_t> neighbor_order(const qx::EmbeddingSet& set,
                                                 std::uint32_t query) {
  struct Entry {
    double score;
    std::string id;
    std::uint32_t index;
  };
  std::vector<Entry> entries;
  for (std::uint32_t j = 0; j < set.size(); ++j) {
    if (j == query) continue;
    entries.push_back({cosine(vec_of(set, query), vec_of(set, j)), set.id(j), j});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  std::vector<std::uint32_t> order;
  for (const auto& e : entries) order.push_back(e.index);
  return order;
}

struct QeSpec {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t top_n = 0;
  bool bidirectional = false;
  bool mean_rule = true;  // false = score the two expanded vectors directly
  bool exclude_partner = false;
};

inline std::vector<double> expand(const qx::EmbeddingSet& set, std::uint32_t query,
                                  std::uint32_t partner, const QeSpec& s) {
  std::vector<std::uint32_t> order = neighbor_order(set, query);
  if (s.exclude_partner && partner != query) {
    order.erase(std::remove(order.begin(), order.end(), partner), order.end());
  }
  const std::size_t d = set.dim();
  std::vector<double> out(d, 0.0);
  const std::vector<double> q = vec_of(set, query);
  for (std::size_t k = 0; k < d; ++k) out[k] = s.alpha * q[k];

  const std::size_t n_rel = std::min(s.top_n, order.size());
  if (n_rel > 0) {
    std::vector<double> sum(d, 0.0);
    for (std::size_t r = 0; r < n_rel; ++r) {
      const std::vector<double> v = vec_of(set, order[r]);
      for (std::size_t k = 0; k < d; ++k) sum[k] += v[k];
    }
    for (std::size_t k = 0; k < d; ++k)
      out[k] += s.beta / static_cast<double>(n_rel) * sum[k];
  }
  const std::size_t n_non = order.size() - n_rel;
  if (n_non > 0) {
    std::vector<double> sum(d, 0.0);
    for (std::size_t r = n_rel; r < order.size(); ++r) {
      const std::vector<double> v = vec_of(set, order[r]);
      for (std::size_t k = 0; k < d; ++k) sum[k] += v[k];
    }
    for (std::size_t k = 0; k < d; ++k)
      out[k] -= s.gamma / static_cast<double>(n_non) * sum[k];
  }
  return out;
}

inline double qe_score(const qx::EmbeddingSet& set, std::uint32_t enroll,
                       std::uint32_t test, const QeSpec& s) {
  if (!s.bidirectional)
    return cosine(expand(set, enroll, test, s), vec_of(set, test));
  if (s.mean_rule) {
    const double et = cosine(expand(set, enroll, test, s), vec_of(set, test));
    const double te = cosine(expand(set, test, enroll, s), vec_of(set, enroll));
    return 0.5 * (et + te);
  }
  return cosine(expand(set, enroll, test, s), expand(set, test, enroll, s));
}

// Brute-force EER / minDCF by enumerating mid-point thresholds (plus one
// below the minimum and one above the maximum score) under the convention
// "accept iff score >= threshold", counting errors with plain loops.
struct EvalRef {
  double eer = 0.0;
  double min_dcf = 0.0;          // normalized
  double min_dcf_unnorm = 0.0;
};

inline EvalRef evaluate(const std::vector<double>& targets,
                        const std::vector<double>& nontargets,
                        const qx::DcfParams& p) {
  std::vector<double> distinct;
  distinct.insert(distinct.end(), targets.begin(), targets.end());
  distinct.insert(distinct.end(), nontargets.begin(), nontargets.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> thresholds;
  thresholds.push_back(distinct.front() - 1.0);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    double m = 0.5 * (distinct[i] + distinct[i + 1]);
    // Adjacent representable values have no interior point; the right
    // endpoint then encodes the same accept-iff-score>=t decision rule.
    if (!(m > distinct[i])) m = distinct[i + 1];
    thresholds.push_back(m);
  }
  thresholds.push_back(distinct.back() + 1.0);

  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  std::vector<double> pms, pfs;
  for (double t : thresholds) {
    std::size_t miss = 0, fa = 0;
    for (double s : targets)
      if (s < t) ++miss;
    for (double s : nontargets)
      if (s >= t) ++fa;
    pms.push_back(static_cast<double>(miss) / nt);
    pfs.push_back(static_cast<double>(fa) / nn);
  }

  EvalRef out;

  // crossing of p_miss - p_fa (non-decreasing along the sweep)
  std::size_t i = 0;
  while (i < pms.size() && pms[i] - pfs[i] < 0.0) ++i;
  if (i >= pms.size()) {
    out.eer = pms.back();
  } else if (pms[i] - pfs[i] == 0.0 || i == 0) {
    out.eer = pms[i];
  } else {
    const double d1 = pms[i - 1] - pfs[i - 1];
    const double d2 = pms[i] - pfs[i];
    const double w = -d1 / (d2 - d1);
    out.eer = pms[i - 1] + w * (pms[i] - pms[i - 1]);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pms.size(); ++k) {
    const double cost = p.c_miss * p.p_target * pms[k] +
                        p.c_fa * (1.0 - p.p_target) * pfs[k];
    if (cost < best) best = cost;
  }
  out.min_dcf_unnorm = best;
  out.min_dcf = best / std::min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target));
  return out;
}

}  // namespace oracle

#endif  // QX_TESTS_ORACLE_HPP_
