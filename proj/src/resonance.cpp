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

#include "atomgraph/resonance.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"

namespace atomgraph {

Strategy parse_strategy(std::string_view name) {
  if (name == "ppr") return Strategy::kPpr;
  if (name == "rwr") return Strategy::kRwr;
  if (name == "power_iteration") return Strategy::kPowerIteration;
  if (name == "katz") return Strategy::kKatz;
  if (name == "label_propagation") return Strategy::kLabelPropagation;
  if (name == "weighted_bfs") return Strategy::kWeightedBfs;
  throw InvalidArgument("unknown propagation strategy '" + std::string(name) + "'");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kPpr: return "ppr";
    case Strategy::kRwr: return "rwr";
    case Strategy::kPowerIteration: return "power_iteration";
    case Strategy::kKatz: return "katz";
    case Strategy::kLabelPropagation: return "label_propagation";
    case Strategy::kWeightedBfs: return "weighted_bfs";
  }
  return "unknown";
}

double PersonalizationVector::total() const {
  double s = 0.0;
  for (const auto& [v, m] : mass) s += m;
  return s;
}

std::vector<double> PersonalizationVector::dense(std::size_t node_count) const {
  std::vector<double> out(node_count, 0.0);
  for (const auto& [v, m] : mass) {
    if (v >= node_count) throw InvalidArgument("seed node out of range");
    out[v] = m;
  }
  return out;
}

PersonalizationVector normalize_seeds(const std::map<NodeIndex, double>& raw) {
  double total = 0.0;
  for (const auto& [v, m] : raw) {
    if (!std::isfinite(m)) throw InvalidArgument("seed mass is not finite");
    if (m > 0.0) total += m;
  }
  if (!(total > 0.0)) throw InvalidArgument("seed distribution has no positive mass");
  PersonalizationVector pv;
  for (const auto& [v, m] : raw) {
    if (m > 0.0) pv.mass.emplace_back(v, m / total);
  }
  return pv;
}

namespace {

std::size_t embedding_dimension(const AtomEntityGraph& graph) {
  if (graph.dimension() == 0) throw GraphError("graph has no embeddings");
  return graph.dimension();
}

void check_distribution(const CsrGraph& graph, std::span<const double> pi) {
  if (pi.size() != graph.node_count()) {
    throw InvalidArgument("personalization has " + std::to_string(pi.size()) + " entries for " +
                          std::to_string(graph.node_count()) + " nodes");
  }
  double s = 0.0;
  for (double x : pi) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("personalization has a negative or non-finite entry");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("personalization does not sum to 1");
}

// One application of r -> restart * pi + (1 - restart) * (P^T r + dangling * pi).
void ppr_step(const CsrGraph& g, std::span<const double> pi, std::span<const double> r, double restart,
              std::vector<double>& scaled, std::vector<double>& next) {
  const std::size_t n = g.node_count();
  double dangling = 0.0;
  for (NodeIndex u = 0; u < n; ++u) {
    const double d = g.weighted_degree(u);
    if (d > 0.0) {
      scaled[u] = r[u] / d;
    } else {
      scaled[u] = 0.0;
      dangling += r[u];
    }
  }
  const double walk = 1.0 - restart;
  for (NodeIndex v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    const auto w = g.weights(v);
    double acc = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) acc += scaled[nb[i]] * w[i];
    next[v] = restart * pi[v] + walk * (acc + dangling * pi[v]);
  }
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// Shared iteration. `stop_factor` converts the step size into the bound on
// the distance to the fixed point that is compared against tol.
ResonanceScores fixed_point(const CsrGraph& g, std::span<const double> pi, std::vector<double> r, double restart,
                            double tol, std::size_t max_iter, Strategy tag) {
  const std::size_t n = g.node_count();
  std::vector<double> scaled(n), next(n);
  const double bound = (1.0 - restart) / restart;
  ResonanceScores out;
  out.strategy = tag;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    ppr_step(g, pi, r, restart, scaled, next);
    const double d = l1_distance(next, r);
    r.swap(next);
    out.iterations = it;
    out.residual = d;
    if (bound * d < tol) {
      out.scores = std::move(r);
      return out;
    }
  }
  throw ConvergenceError(std::string(strategy_name(tag)) + " did not converge in " + std::to_string(max_iter) +
                             " iterations (L1 step " + std::to_string(out.residual) + ")",
                         out.residual);
}

void rescale_to_unit_sum(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0) {
    for (double& x : v) x /= s;
  }
}

ResonanceScores random_walks(const CsrGraph& g, std::span<const double> pi, const PropagationParams& p) {
  const std::size_t n = g.node_count();
  if (p.num_walks == 0) throw InvalidArgument("rwr requires num_walks >= 1");
  std::vector<NodeIndex> support;
  std::vector<double> support_mass;
  for (NodeIndex v = 0; v < n; ++v) {
    if (pi[v] > 0.0) {
      support.push_back(v);
      support_mass.push_back(pi[v]);
    }
  }
  std::mt19937_64 rng(p.seed);
  std::discrete_distribution<std::size_t> start(support_mass.begin(), support_mass.end());
  std::bernoulli_distribution stop(p.restart);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> counts(n, 0.0);
  for (std::size_t w = 0; w < p.num_walks; ++w) {
    NodeIndex at = support[start(rng)];
    for (std::size_t step = 0; step < p.walk_length; ++step) {
      if (stop(rng)) break;
      if (g.degree(at) == 0) {
        at = support[start(rng)];
        continue;
      }
      const auto nb = g.neighbors(at);
      const auto wt = g.weights(at);
      double target = unit(rng) * g.weighted_degree(at);
      std::size_t i = 0;
      for (; i + 1 < nb.size(); ++i) {
        target -= wt[i];
        if (target < 0.0) break;
      }
      at = nb[i];
    }
    counts[at] += 1.0;
  }
  ResonanceScores out;
  out.strategy = Strategy::kRwr;
  out.iterations = p.num_walks;
  for (double& c : counts) c /= static_cast<double>(p.num_walks);
  out.scores = std::move(counts);
  return out;
}

ResonanceScores katz(const CsrGraph& g, std::span<const double> pi, const PropagationParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> term(pi.begin(), pi.end());
  std::vector<double> total(term);
  std::vector<double> next(n);
  for (std::size_t len = 1; len <= p.num_iter && p.katz_decay > 0.0; ++len) {
    for (NodeIndex v = 0; v < n; ++v) {
      const auto nb = g.neighbors(v);
      const auto w = g.weights(v);
      double acc = 0.0;
      for (std::size_t i = 0; i < nb.size(); ++i) acc += term[nb[i]] * w[i];
      next[v] = p.katz_decay * acc;
    }
    term.swap(next);
    for (NodeIndex v = 0; v < n; ++v) total[v] += term[v];
  }
  ResonanceScores out;
  out.strategy = Strategy::kKatz;
  out.iterations = p.num_iter;
  rescale_to_unit_sum(total);
  out.scores = std::move(total);
  return out;
}

// Label spreading with symmetric normalization D^-1/2 W D^-1/2, seeds
// re-injected each sweep.
ResonanceScores label_propagation(const CsrGraph& g, std::span<const double> pi, const PropagationParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> inv_sqrt(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    if (g.weighted_degree(v) > 0.0) inv_sqrt[v] = 1.0 / std::sqrt(g.weighted_degree(v));
  }
  std::vector<double> f(pi.begin(), pi.end());
  std::vector<double> next(n);
  const double smooth = 1.0 - p.restart;
  double step = 0.0;
  for (std::size_t it = 0; it < p.num_iter; ++it) {
    for (NodeIndex v = 0; v < n; ++v) {
      const auto nb = g.neighbors(v);
      const auto w = g.weights(v);
      double acc = 0.0;
      for (std::size_t i = 0; i < nb.size(); ++i) acc += w[i] * inv_sqrt[nb[i]] * f[nb[i]];
      next[v] = smooth * inv_sqrt[v] * acc + p.restart * pi[v];
    }
    step = l1_distance(next, f);
    f.swap(next);
  }
  ResonanceScores out;
  out.strategy = Strategy::kLabelPropagation;
  out.iterations = p.num_iter;
  out.residual = step;
  rescale_to_unit_sum(f);
  out.scores = std::move(f);
  return out;
}

// Frontier expansion from the seeds. A node receives mass only at the hop it
// is first reached, discounted by decay^hop.
ResonanceScores weighted_bfs(const CsrGraph& g, std::span<const double> pi, const PropagationParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> score(pi.begin(), pi.end());
  std::vector<char> visited(n, 0);
  std::vector<NodeIndex> frontier;
  std::vector<double> carried(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    if (pi[v] > 0.0) {
      visited[v] = 1;
      frontier.push_back(v);
      carried[v] = pi[v];
    }
  }
  double factor = 1.0;
  std::vector<double> incoming(n, 0.0);
  std::size_t hops = 0;
  for (; hops < p.bfs_max_hops && !frontier.empty(); ++hops) {
    factor *= p.bfs_decay;
    std::vector<NodeIndex> reached;
    for (NodeIndex u : frontier) {
      const double d = g.weighted_degree(u);
      if (d <= 0.0) continue;
      const auto nb = g.neighbors(u);
      const auto w = g.weights(u);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (visited[nb[i]]) continue;
        if (incoming[nb[i]] == 0.0) reached.push_back(nb[i]);
        incoming[nb[i]] += carried[u] * w[i] / d;
      }
    }
    for (NodeIndex v : reached) {
      visited[v] = 1;
      carried[v] = incoming[v];
      score[v] = factor * incoming[v];
      incoming[v] = 0.0;
    }
    frontier.swap(reached);
  }
  ResonanceScores out;
  out.strategy = Strategy::kWeightedBfs;
  out.iterations = hops;
  rescale_to_unit_sum(score);
  out.scores = std::move(score);
  return out;
}

}  // namespace

RetrievalIndex::RetrievalIndex(const AtomEntityGraph& graph)
    : entity_offset_(graph.entity_count()),
      atoms_(embedding_dimension(graph)),
      entities_(embedding_dimension(graph)) {
  if (!graph.frozen()) throw StateError("retrieval requires a frozen graph");
  for (const auto& [id, e] : graph.entities()) {
    if (!e.embedding) throw GraphError("entity '" + id + "' has no embedding");
    entities_.add(id, *e.embedding);
  }
  for (const auto& [id, a] : graph.atoms()) {
    if (!a.embedding) throw GraphError("atom '" + id + "' has no embedding");
    atoms_.add(id, *a.embedding);
  }
}

PersonalizationVector seed(const Embedding& query, const AtomEntityGraph& graph, const RetrievalIndex& index,
                           const SeedOptions& options, std::span<const std::string> linked_entities) {
  if (!graph.frozen()) throw StateError("seed requires a frozen graph");
  const NodeIndex atom_base = static_cast<NodeIndex>(index.entity_offset());
  std::map<NodeIndex, double> raw;
  std::vector<NodeIndex> top_atoms;
  std::size_t atom_seeds = 0;
  std::size_t entity_seeds = 0;

  if (index.atoms().size() > 0 && options.atom_top_k > 0) {
    const auto sims = index.atoms().similarities(query);
    std::vector<NodeIndex> order(sims.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t k = std::min(options.atom_top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](NodeIndex a, NodeIndex b) { return sims[a] != sims[b] ? sims[a] > sims[b] : a < b; });
    for (std::size_t i = 0; i < k; ++i) {
      const NodeIndex node = atom_base + order[i];
      top_atoms.push_back(node);
      const double m = options.atom_weight * std::max(sims[order[i]], 0.0);
      if (m > 0.0) {
        raw[node] += m;
        ++atom_seeds;
      }
    }
  }

  if (index.entities().size() > 0 && options.entity_top_k > 0) {
    const auto sims = index.entities().similarities(query);
    std::vector<NodeIndex> order;
    for (NodeIndex i = 0; i < sims.size(); ++i) {
      if (sims[i] >= options.entity_sim_threshold) order.push_back(i);
    }
    const std::size_t k = std::min(options.entity_top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](NodeIndex a, NodeIndex b) { return sims[a] != sims[b] ? sims[a] > sims[b] : a < b; });
    order.resize(k);
    for (NodeIndex e : order) {
      const double m = options.entity_node_weight * sims[e];
      if (m > 0.0) {
        raw[e] += m;
        ++entity_seeds;
      }
    }
  }
  for (const auto& id : linked_entities) {
    auto node = graph.index_of(id);
    if (!node || graph.kind(*node) != NodeKind::kEntity) continue;
    const double m = options.entity_node_weight;
    auto [it, inserted] = raw.try_emplace(*node, m);
    if (inserted) {
      ++entity_seeds;
    } else {
      it->second = std::max(it->second, m);
    }
  }

  double total = 0.0;
  for (const auto& [v, m] : raw) total += m;
  if (!(total > 0.0)) {
    if (top_atoms.empty()) throw GraphError("no seeds available: graph has no atoms");
    spdlog::warn("query produced no seed mass; falling back to uniform seeds over {} top atoms", top_atoms.size());
    std::map<NodeIndex, double> uniform;
    for (NodeIndex v : top_atoms) uniform[v] = 1.0;
    auto pv = normalize_seeds(uniform);
    pv.atom_seeds = top_atoms.size();
    pv.fallback = true;
    return pv;
  }
  auto pv = normalize_seeds(raw);
  pv.atom_seeds = atom_seeds;
  pv.entity_seeds = entity_seeds;
  return pv;
}

double ppr_residual(const CsrGraph& graph, std::span<const double> pi, std::span<const double> r, double restart) {
  const std::size_t n = graph.node_count();
  std::vector<double> scaled(n), next(n);
  ppr_step(graph, pi, r, restart, scaled, next);
  return l1_distance(next, r);
}

ResonanceScores ppr(const CsrGraph& graph, std::span<const double> pi, double restart, double tol,
                    std::size_t max_iter) {
  if (!(restart > 0.0 && restart <= 1.0)) throw InvalidArgument("restart probability must be in (0, 1]");
  check_distribution(graph, pi);
  if (restart == 1.0) {
    ResonanceScores out;
    out.scores.assign(pi.begin(), pi.end());
    return out;
  }
  return fixed_point(graph, pi, std::vector<double>(pi.begin(), pi.end()), restart, tol, max_iter, Strategy::kPpr);
}

ResonanceScores propagate(Strategy strategy, const CsrGraph& graph, std::span<const double> pi,
                          const PropagationParams& params) {
  if (!(params.restart > 0.0 && params.restart <= 1.0)) {
    throw InvalidArgument("restart probability must be in (0, 1]");
  }
  check_distribution(graph, pi);
  switch (strategy) {
    case Strategy::kPpr:
      return ppr(graph, pi, params.restart, params.tol, params.max_iter);
    case Strategy::kPowerIteration: {
      // Textbook solve: uniform start, iterated well past the ppr tolerance.
      const std::size_t n = graph.node_count();
      if (params.restart == 1.0) return ppr(graph, pi, 1.0);
      return fixed_point(graph, pi, std::vector<double>(n, 1.0 / static_cast<double>(n)), params.restart,
                         params.tol * 1e-2, params.max_iter, Strategy::kPowerIteration);
    }
    case Strategy::kRwr:
      return random_walks(graph, pi, params);
    case Strategy::kKatz:
      return katz(graph, pi, params);
    case Strategy::kLabelPropagation:
      return label_propagation(graph, pi, params);
    case Strategy::kWeightedBfs:
      return weighted_bfs(graph, pi, params);
  }
  throw InvalidArgument("unknown propagation strategy");
}

std::vector<ScoredAtom> score_atoms(const ResonanceScores& scores, const AtomEntityGraph& graph) {
  if (scores.scores.size() != graph.node_count()) throw InvalidArgument("score vector does not match graph");
  std::vector<ScoredAtom> out;
  out.reserve(graph.atom_count());
  for (NodeIndex v = static_cast<NodeIndex>(graph.entity_count()); v < graph.node_count(); ++v) {
    out.push_back({graph.node_id(v), v, scores.scores[v]});
  }
  return out;
}

}  // namespace atomgraph
