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

#ifndef QX_SYNTHETIC_HPP_
#define QX_SYNTHETIC_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qx/embedding.hpp"
#include "qx/error.hpp"
#include "qx/trial.hpp"

namespace qx {

// SplitMix64 (Steele, Lea & Flood): a tiny, fully specified 64-bit generator.
// Chosen over the standard-library engines so the same seed yields the same
// stream on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by modulo reduction.  The tiny modulo bias
  // is irrelevant here; the reduction is chosen for its portability.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

// Standard normal deviates via the Marsaglia polar transform over SplitMix64
// uniforms.  Each accepted (u, v) pair yields two deviates, consumed in
// order.  The transform uses only sqrt and log, so streams reproduce
// bit-exact wherever those are correctly rounded.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.next_unit() - 1.0;
      v = 2.0 * rng_.next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  SplitMix64& raw() { return rng_; }

 private:
  SplitMix64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// A synthetic speaker population: speaker means are isotropic Gaussian with
// std between_std, utterances are mean plus isotropic Gaussian noise with
// std within_std.  Fully determined by the seed.
struct CohortSpec {
  std::uint32_t n_speakers = 10;
  std::uint32_t utts_per_speaker = 5;
  std::uint32_t dimension = 16;
  double between_std = 1.0;
  double within_std = 0.5;
  std::uint64_t seed = 1;
};

inline void check_spec(const CohortSpec& spec) {
  if (spec.n_speakers == 0) throw Error("n_speakers must be positive");
  if (spec.utts_per_speaker == 0) throw Error("utts_per_speaker must be positive");
  if (spec.dimension == 0) throw Error("dimension must be positive");
  if (!(spec.between_std > 0.0)) throw Error("between_std must be positive");
  if (!(spec.within_std > 0.0)) throw Error("within_std must be positive");
  if (static_cast<std::uint64_t>(spec.n_speakers) * spec.utts_per_speaker < 2)
    throw Error("cohort must contain at least 2 utterances");
}

// Draw order (fixed, part of the format): for each speaker, first its mean
// (dimension deviates), then each utterance (dimension deviates), all from a
// single sequential stream.  Ids are spk{i}_utt{j} with 0-based indices.
inline EmbeddingSet generate(const CohortSpec& spec) {
  check_spec(spec);
  GaussianStream g(spec.seed);
  EmbeddingSet set(spec.dimension);
  std::vector<double> mean(spec.dimension);
  for (std::uint32_t i = 0; i < spec.n_speakers; ++i) {
    for (auto& m : mean) m = spec.between_std * g.next();
    const std::string speaker = "spk" + std::to_string(i);
    for (std::uint32_t j = 0; j < spec.utts_per_speaker; ++j) {
      std::vector<double> v(spec.dimension);
      for (std::uint32_t k = 0; k < spec.dimension; ++k)
        v[k] = mean[k] + spec.within_std * g.next();
      set.add({speaker + "_utt" + std::to_string(j), std::move(v), speaker});
    }
  }
  return set;
}

namespace detail {

// Partial Fisher-Yates: permutes the first `take` slots, each drawn
// uniformly from the remaining suffix.
template <typename T>
inline void partial_shuffle(std::vector<T>& items, std::size_t take,
                            SplitMix64& rng) {
  for (std::size_t k = 0; k < take && k + 1 < items.size(); ++k) {
    const std::size_t pick =
        k + static_cast<std::size_t>(rng.next_below(items.size() - k));
    std::swap(items[k], items[pick]);
  }
}

}  // namespace detail

// Samples target (same-speaker) and nontarget (cross-speaker) trials
// uniformly without replacement.  Every embedding must carry a speaker
// label.  No self-pairs; enroll is always the lower-indexed utterance.
inline TrialList make_trials(const EmbeddingSet& set, std::size_t n_target,
                             std::size_t n_nontarget, std::uint64_t seed) {
  using IndexPair = std::pair<std::uint32_t, std::uint32_t>;
  std::vector<IndexPair> same, cross;
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    if (set.speaker(i).empty())
      throw Error("make_trials: embedding '" + set.id(i) +
                  "' has no speaker label");
    for (std::uint32_t j = i + 1; j < set.size(); ++j)
      (set.speaker(i) == set.speaker(j) ? same : cross).emplace_back(i, j);
  }
  if (n_target > same.size())
    throw Error("requested " + std::to_string(n_target) +
                " target trials but only " + std::to_string(same.size()) +
                " same-speaker pairs exist");
  if (n_nontarget > cross.size())
    throw Error("requested " + std::to_string(n_nontarget) +
                " nontarget trials but only " + std::to_string(cross.size()) +
                " cross-speaker pairs exist");

  SplitMix64 rng(seed);
  detail::partial_shuffle(same, n_target, rng);
  detail::partial_shuffle(cross, n_nontarget, rng);

  TrialList trials;
  trials.reserve(n_target + n_nontarget);
  for (std::size_t k = 0; k < n_target; ++k)
    trials.push_back({set.id(same[k].first), set.id(same[k].second), Label::target});
  for (std::size_t k = 0; k < n_nontarget; ++k)
    trials.push_back({set.id(cross[k].first), set.id(cross[k].second), Label::nontarget});
  return trials;
}

}  // namespace qx

#endif  // QX_SYNTHETIC_HPP_
