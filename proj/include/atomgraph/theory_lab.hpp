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

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/graph.hpp"

namespace atomgraph::theory {

// Two-state abstraction of PPR leakage: the relevant region is left with
// probability gamma and re-entered with probability epsilon; restart returns
// all mass to the relevant region.
struct MacroChain {
  double gamma = 0.0;
  double epsilon = 0.0;
  double rho = 0.3;
  void validate() const;  // gamma, epsilon in [0, 1]; rho in (0, 1)
};

double leakage_closed_form(const MacroChain& chain);

struct LeakageSimulation {
  double phi = 0.0;  // stationary mass on the relevant region
  std::size_t iterations = 0;
};

// Iterates phi <- rho * e + (1 - rho) * phi * T on the two states until the
// distance to the fixed point is below tol.
LeakageSimulation leakage_simulated(const MacroChain& chain, double tol = 1e-14, std::size_t max_iter = 1000000);

struct MisrankInstance {
  std::size_t r = 1;   // necessary atoms in the relevant unit
  std::size_t M = 1;   // unit size
  double delta_mu = 1.0;
  double sigma = 1.0;
  std::size_t m = 0;   // minimal evidence size, informational
  void validate() const;
};

double misrank_bound(const MisrankInstance& inst);
double expected_score_gap(const MisrankInstance& inst);

struct MisrankSimulation {
  std::size_t trials = 0;
  std::size_t misranked = 0;
  double probability = 0.0;
  double mean_gap = 0.0;
  double gap_stderr = 0.0;
  double bound = 0.0;
  double expected_gap = 0.0;

  bool bound_holds() const { return probability <= bound; }
  bool gap_within(double standard_errors = 3.0) const;
};

// Per trial, draws atom scores mu + N(0, sigma^2) for a relevant unit (r atoms
// with mean delta_mu, the rest 0) and an irrelevant unit (M atoms with mean
// 0), ranks by mean score and counts ties or inversions as misrankings.
// Throws InvalidArgument for fewer than 10^4 trials.
MisrankSimulation misrank_simulate(const MisrankInstance& inst, std::size_t trials, std::uint64_t seed);

// min(1, k c / m).
double coverage_bound(std::size_t k, std::size_t c, std::size_t m);

struct CoverageInstance {
  std::size_t atoms = 0;
  std::vector<std::size_t> necessary;           // sorted atom ids
  std::vector<std::vector<std::size_t>> units;  // each of size <= c
  std::size_t k = 1;
  std::size_t c = 1;
};

CoverageInstance random_coverage_instance(std::mt19937_64& rng, std::size_t max_atoms = 12);

// Units are all c-element subsets of `atoms` atoms; atoms [0, m) are
// necessary.
CoverageInstance exhaustive_unit_instance(std::size_t atoms, std::size_t m, std::size_t k, std::size_t c);

// Largest number of necessary atoms covered by any choice of min(k, |units|)
// units, found by enumerating all such choices.
std::size_t max_covered(const CoverageInstance& inst);

struct KnowledgeGraph {
  std::set<std::string> entities;
  std::set<std::array<std::string, 3>> triples;  // (head, relation, tail)
  friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;
};

KnowledgeGraph random_kg(std::mt19937_64& rng, std::size_t max_entities = 30, std::size_t max_triples = 100,
                         std::size_t max_labels = 10);

// Atom text for a relational core, optionally followed by free context.
// Names and labels are escaped so the core parses back unambiguously.
std::string encode_core(const std::array<std::string, 3>& triple, const std::string& context = {});
std::array<std::string, 3> decode_core(const std::string& text);

// One atom per triple whose entity set is {head, tail}; every KG entity
// becomes an entity node.
AtomEntityGraph kg_to_aeg(const KnowledgeGraph& kg);

// Entity names plus the relational core parsed from every atom.
KnowledgeGraph aeg_to_kg(const AtomEntityGraph& graph);

bool kg_roundtrip(const KnowledgeGraph& kg);

struct DistinguishabilityReport {
  std::vector<std::string> atom_texts;
  std::size_t atoms = 0;
  std::size_t projected_triples = 0;
  bool strict() const { return atoms > projected_triples; }
};

// Two atoms with the same relational core and different context.
DistinguishabilityReport contextual_distinguishability_demo();

struct SweepPoint {
  double p_noise = 0.0;
  std::size_t cross_edges = 0;
  double relevant_mass = 0.0;
};

struct SweepOptions {
  std::size_t relevant_nodes = 40;
  std::size_t irrelevant_nodes = 60;
  double p_intra = 0.15;
  std::size_t base_cross_edges = 3;
  double rho = 0.3;
  // Noise levels stay at or below p_intra, where cross edges are the minority.
  std::vector<double> p_noise = {0.0, 0.01, 0.02, 0.05, 0.1, 0.15};
};

// Two-region random graph; seeds are uniform over the relevant region. Cross
// edges are added when a per-pair uniform draw is below p_noise, so the edge
// sets are nested across the sweep. Throws InvalidArgument for noise levels
// outside [0, p_intra].
std::vector<SweepPoint> robustness_sweep(const SweepOptions& options, std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string summary;
  double seconds = 0.0;
  nlohmann::json data;
};

struct TheoryCheckOptions {
  std::uint64_t seed = 0;
  std::size_t misrank_trials = 100000;
  std::size_t coverage_instances = 200;
  std::size_t kg_instances = 500;
  std::size_t leakage_steps = 19;  // grid 0.05, 0.10, ... for 19 steps
  std::size_t sweep_graphs = 20;
};

std::vector<MisrankInstance> default_misrank_grid();

std::vector<CheckResult> run_theory_checks(const TheoryCheckOptions& options);

}  // namespace atomgraph::theory
