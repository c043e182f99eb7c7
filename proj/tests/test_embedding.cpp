// Copyright 2026 The atomgraph Authors
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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "atomgraph/embedding.hpp"
#include "atomgraph/errors.hpp"

using namespace atomgraph;

TEST_CASE("normalized produces unit vectors") {
  const auto e = Embedding::normalized({3.0, 4.0});
  CHECK(e.dimension() == 2);
  CHECK(e.values()[0] == doctest::Approx(0.6));
  CHECK(e.values()[1] == doctest::Approx(0.8));
  CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(Embedding::normalized({0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(Embedding::normalized({}), InvalidArgument);
  CHECK_THROWS_AS(Embedding::normalized({1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
  CHECK_THROWS_AS(Embedding::normalized({std::numeric_limits<double>::infinity()}), InvalidArgument);
  CHECK_THROWS_AS(Embedding::from_unit({0.5, 0.5}), InvalidArgument);
}

TEST_CASE("from_unit keeps the exact bits") {
  const auto e = Embedding::normalized({1.0, 2.0, 3.0});
  const std::vector<double> raw(e.values().begin(), e.values().end());
  CHECK(Embedding::from_unit(raw) == e);
}

TEST_CASE("cosine is symmetric, bounded and 1 on itself") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(16), b(16);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const auto ea = Embedding::normalized(a), eb = Embedding::normalized(b);
    CHECK(cosine(ea, eb) == cosine(eb, ea));
    CHECK(cosine(ea, eb) <= 1.0);
    CHECK(cosine(ea, eb) >= -1.0);
    CHECK(cosine(ea, ea) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(cosine(Embedding::normalized({1, 0}), Embedding::normalized({-1, 0})) == -1.0);
  CHECK(cosine(Embedding::normalized({1, 0}), Embedding::normalized({0, 1})) == 0.0);
}

TEST_CASE("dot") {
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  CHECK(dot(a, b) == 12.0);
}
