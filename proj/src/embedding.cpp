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

#include "atomgraph/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "atomgraph/errors.hpp"

namespace atomgraph {

namespace {
double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

Embedding Embedding::normalized(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("embedding has dimension 0");
  for (double x : values) {
    if (!std::isfinite(x)) throw InvalidArgument("embedding has a non-finite entry");
  }
  const double n = l2(values);
  if (n == 0.0) throw InvalidArgument("cannot normalize a zero vector");
  for (double& x : values) x /= n;
  return Embedding(std::move(values));
}

Embedding Embedding::from_unit(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("embedding has dimension 0");
  for (double x : values) {
    if (!std::isfinite(x)) throw InvalidArgument("embedding has a non-finite entry");
  }
  if (std::abs(l2(values) - 1.0) > 1e-6) {
    throw InvalidArgument("embedding is not unit-norm");
  }
  return Embedding(std::move(values));
}

double Embedding::norm() const { return l2(values_); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dimension mismatch in dot product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine(const Embedding& a, const Embedding& b) {
  return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

}  // namespace atomgraph
