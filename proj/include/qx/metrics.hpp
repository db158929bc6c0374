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

#ifndef QX_METRICS_HPP_
#define QX_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qx/error.hpp"
#include "qx/trial.hpp"

namespace qx {

// Detection cost parameters.  The defaults match the usual challenge
// setting: C_miss = 1, C_fa = 1, p_target = 0.05.
struct DcfParams {
  double c_miss = 1.0;
  double c_fa = 1.0;
  double p_target = 0.05;
};

inline void check_params(const DcfParams& p) {
  if (!(p.c_miss > 0.0) || !std::isfinite(p.c_miss))
    throw Error("c_miss must be positive");
  if (!(p.c_fa > 0.0) || !std::isfinite(p.c_fa))
    throw Error("c_fa must be positive");
  if (!(p.p_target > 0.0 && p.p_target < 1.0))
    throw Error("p_target must lie in (0, 1)");
}

// One operating point of the detection trade-off.  The decision convention
// is "accept iff score >= threshold", so
//   p_miss(t) = fraction of target scores  <  t   (non-decreasing in t)
//   p_fa(t)   = fraction of nontarget scores >= t (non-increasing in t)
struct DetPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

// Operating points at every distinct score value plus the two constant
// decisions: threshold -inf (accept everything) and +inf (reject
// everything).  Thresholds are strictly increasing.
struct DetCurve {
  std::vector<DetPoint> points;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

struct EerResult {
  double eer;        // fraction in [0, 1]
  double threshold;  // score at which the two error rates cross
};

struct MinDcfResult {
  double min_dcf;       // normalized by the best constant-decision cost
  double threshold;     // smallest threshold attaining the minimum
  double unnormalized;  // raw minimum cost
};

struct EvalResult {
  double eer;
  double eer_threshold;
  double min_dcf;
  double min_dcf_threshold;
  double min_dcf_unnormalized;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

inline DetCurve det_curve(const ScoreSet& scores) {
  std::vector<double> targets, nontargets;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    switch (scores.trials[i].label) {
      case Label::target: targets.push_back(scores.scores[i]); break;
      case Label::nontarget: nontargets.push_back(scores.scores[i]); break;
      case Label::unknown:
        throw Error("trial " + std::to_string(i) +
                    ": unlabeled trial, cannot evaluate");
    }
  }
  if (targets.empty()) throw Error("no target trials, cannot evaluate");
  if (nontargets.empty()) throw Error("no nontarget trials, cannot evaluate");

  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());
  std::vector<double> thresholds;
  thresholds.reserve(targets.size() + nontargets.size());
  thresholds.insert(thresholds.end(), targets.begin(), targets.end());
  thresholds.insert(thresholds.end(), nontargets.begin(), nontargets.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  DetCurve curve;
  curve.n_target = targets.size();
  curve.n_nontarget = nontargets.size();
  curve.points.reserve(thresholds.size() + 2);
  const double inf = std::numeric_limits<double>::infinity();
  curve.points.push_back({-inf, 0.0, 1.0});
  for (double t : thresholds) {
    const auto below_t = static_cast<double>(
        std::lower_bound(targets.begin(), targets.end(), t) - targets.begin());
    const auto below_n = static_cast<double>(
        std::lower_bound(nontargets.begin(), nontargets.end(), t) -
        nontargets.begin());
    curve.points.push_back({t, below_t / nt, (nn - below_n) / nn});
  }
  curve.points.push_back({inf, 1.0, 0.0});
  return curve;
}

// Equal error rate: p_miss - p_fa is non-decreasing along the curve, so the
// crossing lies between the first adjacent pair where it changes sign.  Both
// rates are interpolated linearly to the crossing; an exact crossing point is
// returned as-is.
inline EerResult eer(const DetCurve& curve) {
  if (curve.points.size() < 2) throw Error("eer: invalid curve");
  std::size_t i = 0;
  while (i < curve.points.size() &&
         curve.points[i].p_miss - curve.points[i].p_fa < 0.0)
    ++i;
  if (i == curve.points.size()) throw Error("eer: no crossing found");
  const DetPoint& hi = curve.points[i];
  const double d2 = hi.p_miss - hi.p_fa;
  if (d2 == 0.0) return {hi.p_miss, hi.threshold};
  if (i == 0) return {hi.p_miss, hi.threshold};  // curve starts past the crossing
  const DetPoint& lo = curve.points[i - 1];
  const double d1 = lo.p_miss - lo.p_fa;
  const double w = -d1 / (d2 - d1);
  const double value = lo.p_miss + w * (hi.p_miss - lo.p_miss);
  double threshold;
  if (std::isfinite(lo.threshold) && std::isfinite(hi.threshold))
    threshold = lo.threshold + w * (hi.threshold - lo.threshold);
  else
    threshold = std::isfinite(lo.threshold) ? lo.threshold : hi.threshold;
  return {value, threshold};
}

// Minimum detection cost over all operating points:
//   C(t) = c_miss * p_target * p_miss(t) + c_fa * (1 - p_target) * p_fa(t)
// normalized by the cheaper constant decision,
//   min(c_miss * p_target, c_fa * (1 - p_target)).
// Both constant decisions are on the curve, so the normalized value never
// exceeds 1.  Ties are resolved toward the smallest threshold.
inline MinDcfResult min_dcf(const DetCurve& curve, const DcfParams& params = {}) {
  check_params(params);
  if (curve.points.empty()) throw Error("min_dcf: invalid curve");
  double best = std::numeric_limits<double>::infinity();
  double best_threshold = curve.points.front().threshold;
  for (const DetPoint& p : curve.points) {
    const double cost = params.c_miss * params.p_target * p.p_miss +
                        params.c_fa * (1.0 - params.p_target) * p.p_fa;
    if (cost < best) {
      best = cost;
      best_threshold = p.threshold;
    }
  }
  const double normalizer =
      std::min(params.c_miss * params.p_target,
               params.c_fa * (1.0 - params.p_target));
  return {best / normalizer, best_threshold, best};
}

inline EvalResult evaluate(const ScoreSet& scores, const DcfParams& params = {}) {
  DetCurve curve = det_curve(scores);
  EerResult e = eer(curve);
  MinDcfResult d = min_dcf(curve, params);
  return {e.eer,    e.threshold,      d.min_dcf,
          d.threshold, d.unnormalized, curve.n_target,
          curve.n_nontarget};
}

}  // namespace qx

#endif  // QX_METRICS_HPP_
