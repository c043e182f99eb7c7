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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atomgraph {

// Unit-norm dense vector. Constructed only through the factories so the
// invariant (finite entries, L2 norm 1) always holds.
class Embedding {
 public:
  Embedding() = default;

  // Normalizes `values` to unit length. Throws InvalidArgument on non-finite
  // entries or a zero vector.
  static Embedding normalized(std::vector<double> values);

  // Adopts values that are already unit-norm (within 1e-6) without touching
  // them, so persisted vectors round-trip bit-exactly.
  static Embedding from_unit(std::vector<double> values);

  std::size_t dimension() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  double norm() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// Dot product of unit vectors clamped to [-1, 1]. Summation runs in index
// order, so cosine(u, v) and cosine(v, u) are bitwise equal.
double cosine(const Embedding& a, const Embedding& b);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace atomgraph
