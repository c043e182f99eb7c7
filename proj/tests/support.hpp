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

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/llm_gateway.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(ATOMGRAPH_TEST_DATA) / name;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("atomgraph_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::shared_ptr<atomgraph::MockBackend> mock(const std::vector<nlohmann::json>& entries) {
  auto m = std::make_shared<atomgraph::MockBackend>();
  for (const auto& e : entries) m->add_fixture(e);
  return m;
}

inline atomgraph::LlmGateway gateway_with(const std::vector<nlohmann::json>& entries) {
  return atomgraph::LlmGateway(mock(entries), atomgraph::PromptRegistry::builtin());
}

// Connected random weighted graph: a spanning path plus extra random edges.
inline atomgraph::CsrGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra_edges) {
  std::vector<atomgraph::WeightedEdge> edges;
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t v = 1; v < n; ++v) {
    edges.push_back({static_cast<atomgraph::NodeIndex>(v - 1), static_cast<atomgraph::NodeIndex>(v), w(rng)});
  }
  for (std::size_t i = 0; i < extra_edges; ++i) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    edges.push_back({static_cast<atomgraph::NodeIndex>(a), static_cast<atomgraph::NodeIndex>(b), w(rng)});
  }
  return atomgraph::CsrGraph::from_edges(n, edges);
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, std::size_t support) {
  std::vector<double> pi(n, 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    const double m = mass(rng);
    pi[pick(rng)] += m;
    total += m;
  }
  for (auto& x : pi) x /= total;
  return pi;
}

}  // namespace testing
