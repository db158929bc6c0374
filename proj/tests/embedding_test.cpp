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

#include <cmath>
#include <limits>

#include <doctest.h>

#include "qx/embedding.hpp"
#include "qx/synthetic.hpp"
#include "test_util.hpp"

using qx::EmbeddingSet;
using qx::Violation;
using testutil::make_set;

TEST_CASE("embedding set preserves insertion order and resolves ids") {
  EmbeddingSet set = make_set(2, {{"u2", {1, 0}}, {"u0", {0, 1}}, {"u1", {1, 1}}});
  CHECK(set.size() == 3);
  CHECK(set.dim() == 2);
  CHECK(set.id(0) == "u2");
  CHECK(set.id(1) == "u0");
  CHECK(set.id(2) == "u1");
  CHECK(set.require("u1") == 2);
  CHECK(!set.find("missing"));
  CHECK_THROWS_AS((void)set.require("missing"), qx::Error);
}

TEST_CASE("add rejects dimension mismatches and empty ids") {
  EmbeddingSet set(3);
  CHECK_THROWS_AS(set.add({"a", {1, 2}, ""}), qx::Error);
  CHECK_THROWS_AS(set.add({"", {1, 2, 3}, ""}), qx::Error);
}

TEST_CASE("l2_normalize examples") {
  EmbeddingSet set = make_set(2, {{"a", {3, 4}}, {"b", {1, 0}}});
  EmbeddingSet out = qx::l2_normalize(set);
  CHECK(out.vec(0)[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.vec(0)[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(out.vec(1)[0] == 1.0);
  CHECK(out.vec(1)[1] == 0.0);
  CHECK(out.id(0) == "a");
  CHECK(out.dim() == 2);

  EmbeddingSet four = make_set(4, {{"x", {2, 2, 2, 2}}});
  EmbeddingSet nfour = qx::l2_normalize(four);
  for (int k = 0; k < 4; ++k) CHECK(nfour.vec(0)[k] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("l2_normalize rejects the zero vector") {
  EmbeddingSet set = make_set(2, {{"z", {0, 0}}});
  CHECK_THROWS_WITH_AS(qx::l2_normalize(set), doctest::Contains("zero vector"),
                       qx::Error);
}

TEST_CASE("l2_normalize yields unit norms and is idempotent") {
  qx::GaussianStream g(42);
  EmbeddingSet set(8);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = 3.0 * g.next();
    set.add({"u" + std::to_string(i), v, ""});
  }
  EmbeddingSet once = qx::l2_normalize(set);
  EmbeddingSet twice = qx::l2_normalize(once);
  for (std::uint32_t i = 0; i < once.size(); ++i) {
    double norm2 = 0.0;
    for (double x : once.vec(i)) norm2 += x * x;
    CHECK_NEAR(std::sqrt(norm2), 1.0, 1e-12);
    for (std::uint32_t k = 0; k < once.dim(); ++k)
      CHECK_NEAR(once.vec(i)[k], twice.vec(i)[k], 1e-12);
  }
}

TEST_CASE("validate reports nothing on a clean set") {
  EmbeddingSet set = make_set(2, {{"a", {1, 0}}, {"b", {0, 1}}});
  CHECK(qx::validate(set).empty());
}

TEST_CASE("validate enumerates violations") {
  EmbeddingSet set = make_set(2, {{"a", {1, 0}}});
  auto report = qx::validate(set);
  REQUIRE(report.size() == 1);
  CHECK(report[0].kind == Violation::Kind::insufficient_size);

  set.add({"z", {0, 0}, ""});
  set.add({"a", {1, 1}, ""});  // duplicate id
  set.add({"n", {1, std::numeric_limits<double>::quiet_NaN()}, ""});
  report = qx::validate(set);
  REQUIRE(report.size() == 3);
  CHECK(report[0].kind == Violation::Kind::zero_vector);
  CHECK(report[0].id == "z");
  CHECK(report[1].kind == Violation::Kind::duplicate_id);
  CHECK(report[1].id == "a");
  CHECK(report[2].kind == Violation::Kind::non_finite);
  CHECK(report[2].id == "n");
}
