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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/graph.hpp"
#include "atomgraph/vector_index.hpp"

namespace atomgraph {

enum class Strategy { kPpr, kRwr, kPowerIteration, kKatz, kLabelPropagation, kWeightedBfs };

Strategy parse_strategy(std::string_view name);
const char* strategy_name(Strategy s);

// Sparse seed distribution over graph nodes, sorted by node index.
struct PersonalizationVector {
  std::vector<std::pair<NodeIndex, double>> mass;
  std::size_t atom_seeds = 0;
  std::size_t entity_seeds = 0;
  bool fallback = false;

  double total() const;
  std::vector<double> dense(std::size_t node_count) const;
};

// Drops non-positive entries and scales the rest to sum to one. Throws
// InvalidArgument when nothing positive remains.
PersonalizationVector normalize_seeds(const std::map<NodeIndex, double>& raw);

struct SeedOptions {
  double atom_weight = 0.1;          // attenuation of atom seeds
  std::size_t atom_top_k = 25;       // atoms taken from the dense index
  std::size_t entity_top_k = 20;
  double entity_sim_threshold = 0.3;
  double entity_node_weight = 1.0;
};

// Dense indexes over a frozen graph. Entity row i is node i; atom row j is
// node entity_count + j.
class RetrievalIndex {
 public:
  explicit RetrievalIndex(const AtomEntityGraph& graph);
  const VectorIndex& atoms() const { return atoms_; }
  const VectorIndex& entities() const { return entities_; }
  std::size_t entity_offset() const { return entity_offset_; }

 private:
  std::size_t entity_offset_;
  VectorIndex atoms_;
  VectorIndex entities_;
};

// Atom seeds: top atom_top_k atoms by cosine, mass atom_weight * max(sim, 0).
// Entity seeds: up to entity_top_k entities with cosine >= threshold, mass
// entity_node_weight * sim; `linked_entities` (e.g. from entity recognition
// on the query) add entity_node_weight each, taking the max with any
// similarity seed. Combined and normalized. If no mass results, falls back to
// a uniform distribution over the top atoms and logs a warning.
PersonalizationVector seed(const Embedding& query, const AtomEntityGraph& graph, const RetrievalIndex& index,
                           const SeedOptions& options = {}, std::span<const std::string> linked_entities = {});

struct PropagationParams {
  double restart = 0.3;         // teleport probability back to the seeds
  double tol = 1e-8;            // L1 tolerance for the fixed-point solvers
  std::size_t max_iter = 1000;  // fixed-point solvers
  std::size_t num_iter = 20;    // label propagation sweeps, katz path length
  std::size_t num_walks = 1000;
  std::size_t walk_length = 10;
  std::uint64_t seed = 0;       // Monte-Carlo walks
  double katz_decay = 0.1;
  double bfs_decay = 0.5;
  std::size_t bfs_max_hops = 4;
};

struct ResonanceScores {
  std::vector<double> scores;  // indexed by node
  Strategy strategy = Strategy::kPpr;
  std::size_t iterations = 0;
  double residual = 0.0;  // final L1 step size for iterative solvers
};

// Fixed point of r = restart * pi + (1 - restart) * P^T r, where P is the
// row-normalized weighted adjacency and dangling nodes send their mass to pi.
// Starts from pi and stops once the L1 distance to the fixed point is
// provably below tol. Throws ConvergenceError after max_iter sweeps.
ResonanceScores ppr(const CsrGraph& graph, std::span<const double> pi, double restart, double tol = 1e-8,
                    std::size_t max_iter = 1000);

// ||restart * pi + (1 - restart) * P^T r - r||_1 under the same dangling rule.
double ppr_residual(const CsrGraph& graph, std::span<const double> pi, std::span<const double> r, double restart);

// Strategy dispatch. Non-PPR strategies return scores rescaled to sum to 1.
ResonanceScores propagate(Strategy strategy, const CsrGraph& graph, std::span<const double> pi,
                          const PropagationParams& params = {});

struct ScoredAtom {
  std::string atom_id;
  NodeIndex node = 0;
  double score = 0.0;
  friend bool operator==(const ScoredAtom&, const ScoredAtom&) = default;
};

// Restriction of node scores to atom nodes, in node order.
std::vector<ScoredAtom> score_atoms(const ResonanceScores& scores, const AtomEntityGraph& graph);

}  // namespace atomgraph
