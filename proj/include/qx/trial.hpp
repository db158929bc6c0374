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

#ifndef QX_TRIAL_HPP_
#define QX_TRIAL_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace qx {

enum class Label { target, nontarget, unknown };

// One verification trial: judge whether the enrollment and the test utterance
// belong to the same speaker.  enroll_id == test_id is allowed (degenerate
// self-trial) but scoring operations flag it with a warning.
struct TrialPair {
  std::string enroll_id;
  std::string test_id;
  Label label = Label::unknown;
};

using TrialList = std::vector<TrialPair>;

// Per-trial scores of one system, aligned with the trial list order.
struct ScoreSet {
  std::string system;
  TrialList trials;
  std::vector<double> scores;

  std::size_t size() const { return trials.size(); }
};

}  // namespace qx

#endif  // QX_TRIAL_HPP_
