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

#ifndef QX_FUSION_HPP_
#define QX_FUSION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qx/error.hpp"
#include "qx/trial.hpp"

namespace qx {

// Per-system score normalization applied before fusing.  z_norm and min_max
// are strictly monotone, so within-system trial ordering is preserved.
enum class NormMode { none, z_norm, min_max };

struct FusionParams {
  double lambda = 0.5;  // weight of the first system; 1 - lambda on the second
  NormMode normalization = NormMode::none;
};

inline const char* norm_mode_name(NormMode m) {
  switch (m) {
    case NormMode::none: return "none";
    case NormMode::z_norm: return "z_norm";
    case NormMode::min_max: return "min_max";
  }
  return "?";
}

inline ScoreSet normalize_scores(const ScoreSet& in, NormMode mode) {
  if (mode == NormMode::none) return in;
  const std::size_t n = in.scores.size();
  if (n < 2)
    throw Error("score normalization needs at least 2 scores, got " +
                std::to_string(n));
  ScoreSet out = in;
  if (mode == NormMode::z_norm) {
    double mean = 0.0;
    for (double s : in.scores) mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;  // population variance
    for (double s : in.scores) var += (s - mean) * (s - mean);
    var /= static_cast<double>(n);
    if (var == 0.0)
      throw Error("z-norm is undefined: all scores of system '" + in.system +
                  "' are identical");
    const double inv_std = 1.0 / std::sqrt(var);
    for (double& s : out.scores) s = (s - mean) * inv_std;
  } else {
    const auto [lo, hi] = std::minmax_element(in.scores.begin(), in.scores.end());
    if (*lo == *hi)
      throw Error("min-max normalization is undefined: all scores of system '" +
                  in.system + "' are identical");
    const double inv_range = 1.0 / (*hi - *lo);
    const double min = *lo;
    for (double& s : out.scores) s = (s - min) * inv_range;
  }
  out.system = in.system + std::string("[") + norm_mode_name(mode) + "]";
  return out;
}

namespace detail {

inline Label merge_labels(Label a, Label b, std::size_t index) {
  if (a == Label::unknown) return b;
  if (b == Label::unknown || a == b) return a;
  throw Error("trial " + std::to_string(index) +
              ": conflicting labels between the two score sets");
}

inline void check_aligned(const ScoreSet& a, const ScoreSet& b) {
  if (a.size() != b.size())
    throw Error("score sets cover different trial counts (" +
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                ")");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.trials[i].enroll_id != b.trials[i].enroll_id ||
        a.trials[i].test_id != b.trials[i].test_id)
      throw Error("trial " + std::to_string(i) + ": trial lists diverge (" +
                  a.trials[i].enroll_id + "," + a.trials[i].test_id + " vs " +
                  b.trials[i].enroll_id + "," + b.trials[i].test_id + ")");
  }
}

}  // namespace detail

// Linear fusion of two systems over the identical trial list:
//
//   fused = lambda * a + (1 - lambda) * b
//
// after the per-system normalization requested in the params.  lambda = 1
// and lambda = 0 reproduce the respective input exactly when normalization
// is off.
inline ScoreSet fuse(const ScoreSet& a, const ScoreSet& b,
                     const FusionParams& params) {
  if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
    throw Error("lambda must lie in [0, 1]");
  detail::check_aligned(a, b);

  ScoreSet na_store, nb_store;
  const ScoreSet* na = &a;
  const ScoreSet* nb = &b;
  if (params.normalization != NormMode::none) {
    na_store = normalize_scores(a, params.normalization);
    nb_store = normalize_scores(b, params.normalization);
    na = &na_store;
    nb = &nb_store;
  }

  ScoreSet out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "fuse(lambda=%g,norm=%s)[", params.lambda,
                norm_mode_name(params.normalization));
  out.system = std::string(buf) + a.system + "|" + b.system + "]";
  out.trials = a.trials;
  out.scores.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.trials[i].label =
        detail::merge_labels(a.trials[i].label, b.trials[i].label, i);
    if (params.lambda == 1.0)
      out.scores[i] = na->scores[i];
    else if (params.lambda == 0.0)
      out.scores[i] = nb->scores[i];
    else
      out.scores[i] =
          params.lambda * na->scores[i] + (1.0 - params.lambda) * nb->scores[i];
  }
  return out;
}

}  // namespace qx

#endif  // QX_FUSION_HPP_
