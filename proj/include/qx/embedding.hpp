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

#ifndef QX_EMBEDDING_HPP_
#define QX_EMBEDDING_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qx/error.hpp"

namespace qx {

// One utterance embedding.  The speaker label is optional (empty = none) and
// is only used by synthetic data and trial generation.
struct Embedding {
  std::string id;
  std::vector<double> values;
  std::string speaker;
};

// An ordered, immutable-after-construction collection of embeddings sharing
// one dimension.  Insertion order defines the stable index 0..N-1.  Safe for
// concurrent read-only access.
//
// add() enforces the structural invariants (fixed dimension, non-empty id)
// but deliberately tolerates duplicate ids and degenerate values so that
// validate() can enumerate those violations; file loaders reject them with a
// row/record locus instead.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::uint32_t dimension) : dim_(dimension) {
    if (dimension == 0) throw Error("embedding dimension must be positive");
  }

  std::uint32_t dim() const { return dim_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(ids_.size()); }

  void add(Embedding e) {
    if (e.id.empty()) throw Error("embedding id must not be empty");
    if (e.values.size() != dim_)
      throw Error("embedding '" + e.id + "' has dimension " +
                  std::to_string(e.values.size()) + ", expected " +
                  std::to_string(dim_));
    index_.emplace(e.id, size());  // keeps the first occurrence on duplicates
    ids_.push_back(std::move(e.id));
    speakers_.push_back(std::move(e.speaker));
    data_.insert(data_.end(), e.values.begin(), e.values.end());
  }

  const std::string& id(std::uint32_t i) const { return ids_[i]; }
  const std::string& speaker(std::uint32_t i) const { return speakers_[i]; }

  std::span<const double> vec(std::uint32_t i) const {
    return {data_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }

  std::optional<std::uint32_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t require(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown utterance id '" + id + "'");
    return it->second;
  }

 private:
  std::uint32_t dim_;
  std::vector<double> data_;  // size() * dim(), row-major
  std::vector<std::string> ids_;
  std::vector<std::string> speakers_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Violation {
  enum class Kind { duplicate_id, non_finite, zero_vector, insufficient_size };
  Kind kind;
  std::string id;  // offending utterance id, empty for set-level violations
  std::string message;
};

inline bool is_zero_vector(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Enumerates every invariant violation; an empty report means the set is
// clean.  Violations are data, not errors.
inline std::vector<Violation> validate(const EmbeddingSet& set) {
  std::vector<Violation> report;
  if (set.size() < 2) {
    report.push_back({Violation::Kind::insufficient_size, "",
                      "set has " + std::to_string(set.size()) +
                          " entries; at least 2 are required for scoring"});
  }
  std::unordered_map<std::string, std::uint32_t> seen;
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    const std::string& id = set.id(i);
    auto [it, inserted] = seen.emplace(id, i);
    if (!inserted) {
      report.push_back({Violation::Kind::duplicate_id, id,
                        "duplicate id '" + id + "' at indices " +
                            std::to_string(it->second) + " and " +
                            std::to_string(i)});
    }
    if (!all_finite(set.vec(i))) {
      report.push_back({Violation::Kind::non_finite, id,
                        "embedding '" + id + "' has a non-finite component"});
    } else if (is_zero_vector(set.vec(i))) {
      report.push_back({Violation::Kind::zero_vector, id,
                        "embedding '" + id + "' is the zero vector"});
    }
  }
  return report;
}

// Returns a copy of the set with every vector scaled to unit L2 norm.  Ids,
// order and dimension are unchanged.
inline EmbeddingSet l2_normalize(const EmbeddingSet& set) {
  EmbeddingSet out(set.dim());
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    auto v = set.vec(i);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 == 0.0)
      throw Error("cannot normalize zero vector '" + set.id(i) + "'");
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<double> scaled(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) scaled[k] = v[k] * inv;
    out.add({set.id(i), std::move(scaled), set.speaker(i)});
  }
  return out;
}

}  // namespace qx

#endif  // QX_EMBEDDING_HPP_
