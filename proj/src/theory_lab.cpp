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

#include "atomgraph/theory_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/errors.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/resonance.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph::theory {

void MacroChain::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must be in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must be in [0, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must be in (0, 1)");
}

double leakage_closed_form(const MacroChain& c) {
  c.validate();
  return (c.rho + (1.0 - c.rho) * c.epsilon) / (c.rho + (1.0 - c.rho) * (c.gamma + c.epsilon));
}

LeakageSimulation leakage_simulated(const MacroChain& c, double tol, std::size_t max_iter) {
  c.validate();
  // Row vector over (relevant, irrelevant); restart mass lands on relevant.
  double rel = 1.0, irr = 0.0;
  const double walk = 1.0 - c.rho;
  // Successive differences shrink by |lambda|, the non-unit eigenvalue of the
  // iteration, so the remaining distance is at most |lambda| / (1 - |lambda|) * d.
  const double lambda = std::abs(walk * (1.0 - c.gamma - c.epsilon));
  const double bound = lambda / (1.0 - lambda);
  const double floor = 8.0 * std::numeric_limits<double>::epsilon();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double next_rel = c.rho + walk * (rel * (1.0 - c.gamma) + irr * c.epsilon);
    const double next_irr = walk * (rel * c.gamma + irr * (1.0 - c.epsilon));
    const double d = std::abs(next_rel - rel) + std::abs(next_irr - irr);
    rel = next_rel;
    irr = next_irr;
    if (bound * d < tol || d <= floor) return {rel, it};
  }
  throw ConvergenceError("macro chain iteration did not converge", tol);
}

void MisrankInstance::validate() const {
  if (r < 1) throw InvalidArgument("r must be >= 1");
  if (M < r) throw InvalidArgument("M must be >= r");
  if (!(delta_mu >= 0.0) || !std::isfinite(delta_mu)) throw InvalidArgument("delta_mu must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be > 0");
}

double misrank_bound(const MisrankInstance& inst) {
  inst.validate();
  const double r = static_cast<double>(inst.r);
  return std::exp(-(r * r * inst.delta_mu * inst.delta_mu) /
                  (4.0 * inst.sigma * inst.sigma * static_cast<double>(inst.M)));
}

double expected_score_gap(const MisrankInstance& inst) {
  inst.validate();
  return static_cast<double>(inst.r) / static_cast<double>(inst.M) * inst.delta_mu;
}

bool MisrankSimulation::gap_within(double standard_errors) const {
  return std::abs(mean_gap - expected_gap) <= standard_errors * gap_stderr;
}

MisrankSimulation misrank_simulate(const MisrankInstance& inst, std::size_t trials, std::uint64_t seed) {
  inst.validate();
  if (trials < 10000) throw InvalidArgument("misranking simulation needs at least 10^4 trials");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, inst.sigma);
  const double m = static_cast<double>(inst.M);

  MisrankSimulation out;
  out.trials = trials;
  out.bound = misrank_bound(inst);
  out.expected_gap = expected_score_gap(inst);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double plus = 0.0;
    for (std::size_t i = 0; i < inst.M; ++i) plus += (i < inst.r ? inst.delta_mu : 0.0) + noise(rng);
    double minus = 0.0;
    for (std::size_t i = 0; i < inst.M; ++i) minus += noise(rng);
    plus /= m;
    minus /= m;
    if (minus >= plus) ++out.misranked;
    const double d = plus - minus;
    const double delta = d - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (d - mean);
  }
  const double n = static_cast<double>(trials);
  out.probability = static_cast<double>(out.misranked) / n;
  out.mean_gap = mean;
  out.gap_stderr = std::sqrt(m2 / (n - 1.0) / n);
  return out;
}

double coverage_bound(std::size_t k, std::size_t c, std::size_t m) {
  if (m == 0) throw InvalidArgument("minimal evidence size must be >= 1");
  return std::min(1.0, static_cast<double>(k) * static_cast<double>(c) / static_cast<double>(m));
}

namespace {

std::vector<std::size_t> sample_subset(std::mt19937_64& rng, std::size_t n, std::size_t size) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

CoverageInstance random_coverage_instance(std::mt19937_64& rng, std::size_t max_atoms) {
  if (max_atoms < 3) throw InvalidArgument("coverage instances need at least 3 atoms");
  CoverageInstance inst;
  inst.atoms = uniform_int(rng, 3, max_atoms);
  inst.c = uniform_int(rng, 1, 3);
  inst.k = uniform_int(rng, 1, 4);
  inst.necessary = sample_subset(rng, inst.atoms, uniform_int(rng, 1, inst.atoms));
  const std::size_t units = uniform_int(rng, 1, 10);
  for (std::size_t u = 0; u < units; ++u) {
    inst.units.push_back(sample_subset(rng, inst.atoms, uniform_int(rng, 1, std::min(inst.c, inst.atoms))));
  }
  return inst;
}

CoverageInstance exhaustive_unit_instance(std::size_t atoms, std::size_t m, std::size_t k, std::size_t c) {
  if (m > atoms || c == 0 || c > atoms) throw InvalidArgument("invalid exhaustive instance");
  CoverageInstance inst;
  inst.atoms = atoms;
  inst.k = k;
  inst.c = c;
  for (std::size_t i = 0; i < m; ++i) inst.necessary.push_back(i);
  std::vector<char> pick(atoms, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(c), 1);
  do {
    std::vector<std::size_t> unit;
    for (std::size_t i = 0; i < atoms; ++i) {
      if (pick[i]) unit.push_back(i);
    }
    inst.units.push_back(std::move(unit));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return inst;
}

std::size_t max_covered(const CoverageInstance& inst) {
  const std::size_t n = inst.units.size();
  const std::size_t k = std::min(inst.k, n);
  std::vector<char> necessary(inst.atoms, 0);
  for (std::size_t a : inst.necessary) necessary.at(a) = 1;
  std::vector<char> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), 1);
  std::size_t best = 0;
  std::vector<char> covered(inst.atoms);
  do {
    std::fill(covered.begin(), covered.end(), 0);
    std::size_t count = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (!pick[u]) continue;
      for (std::size_t a : inst.units[u]) {
        if (necessary[a] && !covered[a]) {
          covered[a] = 1;
          ++count;
        }
      }
    }
    best = std::max(best, count);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

KnowledgeGraph random_kg(std::mt19937_64& rng, std::size_t max_entities, std::size_t max_triples,
                         std::size_t max_labels) {
  KnowledgeGraph kg;
  const std::size_t n = uniform_int(rng, 0, max_entities);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    // Every fifth name carries characters that need escaping.
    names.push_back(i % 5 == 4 ? fmt::format("Node {} (alt, \\{};x)", i, i) : fmt::format("Node {}", i));
    kg.entities.insert(names.back());
  }
  if (n == 0) return kg;
  const std::size_t labels = uniform_int(rng, 1, max_labels);
  const std::size_t triples = uniform_int(rng, 0, max_triples);
  for (std::size_t t = 0; t < triples; ++t) {
    kg.triples.insert({names[uniform_int(rng, 0, n - 1)], fmt::format("rel_{}", uniform_int(rng, 0, labels - 1)),
                       names[uniform_int(rng, 0, n - 1)]});
  }
  return kg;
}

namespace {

constexpr std::string_view kSpecial = "\\(),;";
constexpr std::string_view kContextSeparator = " ; ";

void append_escaped(std::string& out, const std::string& s) {
  for (char ch : s) {
    if (kSpecial.find(ch) != std::string_view::npos) out += '\\';
    out += ch;
  }
}

// Reads up to the first unescaped `stop`, unescaping on the way.
std::string read_until(const std::string& text, std::size_t& pos, char stop) {
  std::string out;
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch == '\\') {
      if (pos + 1 >= text.size()) throw InvalidArgument("dangling escape in atom core");
      out += text[pos + 1];
      pos += 2;
      continue;
    }
    if (ch == stop) {
      ++pos;
      return out;
    }
    if (kSpecial.find(ch) != std::string_view::npos) {
      throw InvalidArgument(fmt::format("unexpected '{}' in atom core at offset {}", ch, pos));
    }
    out += ch;
    ++pos;
  }
  throw InvalidArgument(fmt::format("atom core is missing '{}'", stop));
}

}  // namespace

std::string encode_core(const std::array<std::string, 3>& triple, const std::string& context) {
  std::string out;
  append_escaped(out, triple[1]);
  out += '(';
  append_escaped(out, triple[0]);
  out += ", ";
  append_escaped(out, triple[2]);
  out += ')';
  if (!context.empty()) {
    out += kContextSeparator;
    out += context;
  }
  return out;
}

std::array<std::string, 3> decode_core(const std::string& text) {
  std::size_t pos = 0;
  std::array<std::string, 3> t;
  t[1] = read_until(text, pos, '(');
  t[0] = read_until(text, pos, ',');
  if (pos >= text.size() || text[pos] != ' ') throw InvalidArgument("atom core: expected ' ' after ','");
  ++pos;
  t[2] = read_until(text, pos, ')');
  if (pos != text.size() && text.compare(pos, kContextSeparator.size(), kContextSeparator) != 0) {
    throw InvalidArgument("atom core: trailing text without context separator");
  }
  return t;
}

AtomEntityGraph kg_to_aeg(const KnowledgeGraph& kg) {
  std::vector<EntityNode> entities;
  for (const auto& name : kg.entities) entities.push_back({entity_id_for(name), name, std::nullopt, 0});
  std::vector<KnowledgeAtom> atoms;
  std::vector<Triple> triples;
  std::size_t ordinal = 0;
  for (const auto& t : kg.triples) {
    if (!kg.entities.count(t[0]) || !kg.entities.count(t[2])) {
      throw InvalidArgument("triple references an entity outside the graph");
    }
    KnowledgeAtom a;
    a.id = atom_id_for("kg", 0, ordinal++);
    a.text = encode_core(t);
    a.source_doc = "kg";
    a.entity_ids = {entity_id_for(t[0]), entity_id_for(t[2])};
    std::sort(a.entity_ids.begin(), a.entity_ids.end());
    a.entity_ids.erase(std::unique(a.entity_ids.begin(), a.entity_ids.end()), a.entity_ids.end());
    atoms.push_back(std::move(a));
    triples.push_back({entity_id_for(t[0]), t[1], entity_id_for(t[2]), "kg"});
  }
  AtomEntityGraph g;
  if (!entities.empty()) g.add_document_extraction("kg", std::move(entities), std::move(atoms), std::move(triples));
  g.build_relevance_edges();
  g.freeze();
  return g;
}

KnowledgeGraph aeg_to_kg(const AtomEntityGraph& graph) {
  KnowledgeGraph kg;
  for (const auto& [id, e] : graph.entities()) kg.entities.insert(e.canonical_name);
  for (const auto& [id, a] : graph.atoms()) kg.triples.insert(decode_core(a.text));
  return kg;
}

bool kg_roundtrip(const KnowledgeGraph& kg) { return aeg_to_kg(kg_to_aeg(kg)) == kg; }

DistinguishabilityReport contextual_distinguishability_demo() {
  const std::array<std::string, 3> core{"Marie Curie", "won", "Nobel Prize"};
  const std::vector<std::string> contexts{"in Physics in 1903, shared with Pierre Curie and Henri Becquerel",
                                          "in Chemistry in 1911, as sole laureate"};
  std::vector<EntityNode> entities{{entity_id_for(core[0]), core[0], std::nullopt, 0},
                                   {entity_id_for(core[2]), core[2], std::nullopt, 0}};
  std::vector<KnowledgeAtom> atoms;
  std::vector<Triple> triples;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    KnowledgeAtom a;
    a.id = atom_id_for("demo", 0, i);
    a.text = encode_core(core, contexts[i]);
    a.source_doc = "demo";
    a.entity_ids = {entity_id_for(core[0]), entity_id_for(core[2])};
    std::sort(a.entity_ids.begin(), a.entity_ids.end());
    atoms.push_back(std::move(a));
    triples.push_back({entity_id_for(core[0]), core[1], entity_id_for(core[2]), "demo"});
  }
  AtomEntityGraph g;
  g.add_document_extraction("demo", std::move(entities), std::move(atoms), std::move(triples));
  g.build_relevance_edges();
  g.freeze();

  DistinguishabilityReport report;
  for (const auto& [id, a] : g.atoms()) report.atom_texts.push_back(a.text);
  report.atoms = g.atom_count();
  report.projected_triples = aeg_to_kg(g).triples.size();
  return report;
}

std::vector<SweepPoint> robustness_sweep(const SweepOptions& o, std::uint64_t seed) {
  const std::size_t nr = o.relevant_nodes, ni = o.irrelevant_nodes, n = nr + ni;
  if (nr == 0 || ni == 0) throw InvalidArgument("both regions need at least one node");
  for (double p : o.p_noise) {
    if (!(p >= 0.0 && p <= o.p_intra)) throw InvalidArgument("noise levels must lie in [0, p_intra]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<WeightedEdge> base;
  auto intra = [&](NodeIndex lo, NodeIndex hi) {
    for (NodeIndex u = lo; u < hi; ++u) {
      for (NodeIndex v = u + 1; v < hi; ++v) {
        if (unit(rng) < o.p_intra) base.push_back({u, v, 1.0});
      }
    }
  };
  intra(0, static_cast<NodeIndex>(nr));
  intra(static_cast<NodeIndex>(nr), static_cast<NodeIndex>(n));
  std::vector<double> draw(nr * ni);
  for (double& d : draw) d = unit(rng);
  for (std::size_t i = 0; i < o.base_cross_edges; ++i) {
    draw[uniform_int(rng, 0, draw.size() - 1)] = -1.0;  // always present
  }

  std::vector<double> pi(n, 0.0);
  for (std::size_t v = 0; v < nr; ++v) pi[v] = 1.0 / static_cast<double>(nr);

  std::vector<SweepPoint> out;
  for (double p : o.p_noise) {
    auto edges = base;
    std::size_t cross = 0;
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = 0; j < ni; ++j) {
        if (draw[i * ni + j] < p) {
          edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(nr + j), 1.0});
          ++cross;
        }
      }
    }
    const auto g = CsrGraph::from_edges(n, edges);
    const auto r = ppr(g, pi, o.rho, 1e-12, 10000);
    double mass = 0.0;
    for (std::size_t v = 0; v < nr; ++v) mass += r.scores[v];
    out.push_back({p, cross, mass});
  }
  return out;
}

std::vector<MisrankInstance> default_misrank_grid() {
  std::vector<MisrankInstance> grid;
  for (std::size_t r : {1, 2, 3, 5}) {
    for (std::size_t M : {5, 10, 20}) {
      for (double dmu : {0.5, 1.0}) {
        for (double sigma : {0.5, 1.0}) grid.push_back({r, M, dmu, sigma, 0});
      }
    }
  }
  return grid;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
CheckResult timed(const char* name, F&& body) {
  const auto t = Clock::now();
  CheckResult c = body();
  c.name = name;
  c.seconds = std::chrono::duration<double>(Clock::now() - t).count();
  return c;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<CheckResult> run_theory_checks(const TheoryCheckOptions& o) {
  std::vector<CheckResult> out;
  std::vector<double> grid;
  for (std::size_t i = 1; i <= o.leakage_steps; ++i) grid.push_back(0.05 * static_cast<double>(i));

  out.push_back(timed("two_region_leakage", [&] {
    CheckResult c;
    double worst = 0.0;
    std::size_t points = 0;
    for (double rho : grid) {
      for (double gamma : grid) {
        for (double eps : grid) {
          const MacroChain ch{gamma, eps, rho};
          worst = std::max(worst, std::abs(leakage_simulated(ch).phi - leakage_closed_form(ch)));
          ++points;
        }
      }
    }
    c.passed = worst <= 1e-10;
    c.summary = fmt::format("{} grid points, max |simulated - closed form| = {:.3e} (tol 1e-10)", points, worst);
    c.data = {{"points", points}, {"max_abs_error", worst}};
    return c;
  }));

  out.push_back(timed("leakage_monotone_in_gamma", [&] {
    CheckResult c;
    std::size_t violations = 0;
    for (double rho : grid) {
      for (double eps : grid) {
        double prev = 2.0;
        for (double gamma : grid) {
          const double phi = leakage_closed_form({gamma, eps, rho});
          const double sim = leakage_simulated({gamma, eps, rho}).phi;
          if (!(phi < prev) || !(sim < prev + 1e-10)) ++violations;
          prev = phi;
        }
      }
    }
    c.passed = violations == 0;
    c.summary = fmt::format("{} non-decreasing steps in gamma", violations);
    c.data = {{"violations", violations}};
    return c;
  }));

  const auto instances = default_misrank_grid();
  std::vector<MisrankSimulation> sims;
  const auto sim_start = Clock::now();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    sims.push_back(misrank_simulate(instances[i], o.misrank_trials, mix(o.seed, i)));
  }
  const double sim_seconds = std::chrono::duration<double>(Clock::now() - sim_start).count();
  auto grid_json = [&] {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sims.size(); ++i) {
      const auto& in = instances[i];
      const auto& s = sims[i];
      rows.push_back({{"r", in.r},
                      {"M", in.M},
                      {"delta_mu", in.delta_mu},
                      {"sigma", in.sigma},
                      {"empirical", s.probability},
                      {"bound", s.bound},
                      {"mean_gap", s.mean_gap},
                      {"expected_gap", s.expected_gap},
                      {"gap_stderr", s.gap_stderr}});
    }
    return rows;
  };

  out.push_back(timed("misrank_bound", [&] {
    CheckResult c;
    std::size_t violations = 0;
    for (const auto& s : sims) violations += s.bound_holds() ? 0 : 1;
    const double spot = misrank_bound({5, 10, 1.0, 0.5, 0});
    const bool spot_ok = std::abs(spot - 0.0820849986) < 1e-5;
    c.passed = violations == 0 && spot_ok;
    c.summary = fmt::format("{} instances x {} trials, {} above bound; spot value {:.5f}", sims.size(),
                            o.misrank_trials, violations, spot);
    c.data = {{"instances", grid_json()}, {"spot_bound", spot}};
    return c;
  }));
  out.back().seconds += sim_seconds;

  out.push_back(timed("score_gap", [&] {
    CheckResult c;
    std::size_t outside = 0;
    double worst = 0.0;
    for (const auto& s : sims) {
      if (!s.gap_within(3.0)) ++outside;
      worst = std::max(worst, std::abs(s.mean_gap - s.expected_gap) / s.gap_stderr);
    }
    c.passed = outside == 0;
    c.summary = fmt::format("{} instances outside 3 standard errors; worst {:.2f} SE", outside, worst);
    c.data = {{"outside", outside}, {"worst_standard_errors", worst}};
    return c;
  }));

  out.push_back(timed("coverage_bound", [&] {
    CheckResult c;
    std::mt19937_64 rng(mix(o.seed, 1000));
    std::size_t violations = 0;
    for (std::size_t i = 0; i < o.coverage_instances; ++i) {
      const auto inst = random_coverage_instance(rng);
      const std::size_t best = max_covered(inst);
      const double cov = static_cast<double>(best) / static_cast<double>(inst.necessary.size());
      if (best > inst.k * inst.c || cov > coverage_bound(inst.k, inst.c, inst.necessary.size()) + 1e-12) {
        ++violations;
      }
    }
    const auto tight = exhaustive_unit_instance(8, 5, 3, 1);
    const std::size_t tight_best = max_covered(tight);
    const bool infeasible = tight_best < 5 && coverage_bound(3, 1, 5) == 0.6;
    c.passed = violations == 0 && infeasible;
    c.summary = fmt::format("{} random instances, {} violations; k=3 c=1 m=5 covers at most {} of 5", o.coverage_instances,
                            violations, tight_best);
    c.data = {{"instances", o.coverage_instances}, {"violations", violations}, {"k3_c1_m5_best", tight_best}};
    return c;
  }));

  out.push_back(timed("kg_roundtrip", [&] {
    CheckResult c;
    std::mt19937_64 rng(mix(o.seed, 2000));
    std::size_t failures = 0;
    for (std::size_t i = 0; i < o.kg_instances; ++i) failures += kg_roundtrip(random_kg(rng)) ? 0 : 1;
    c.passed = failures == 0;
    c.summary = fmt::format("{} random graphs, {} mismatches", o.kg_instances, failures);
    c.data = {{"instances", o.kg_instances}, {"failures", failures}};
    return c;
  }));

  out.push_back(timed("contextual_distinguishability", [&] {
    CheckResult c;
    const auto d = contextual_distinguishability_demo();
    c.passed = d.atoms == 2 && d.projected_triples == 1;
    c.summary = fmt::format("{} atoms vs {} projected triple(s)", d.atoms, d.projected_triples);
    c.data = {{"atoms", d.atom_texts}, {"projected_triples", d.projected_triples}};
    return c;
  }));

  out.push_back(timed("robustness_sweep", [&] {
    CheckResult c;
    std::size_t increases = 0;
    nlohmann::json graphs = nlohmann::json::array();
    double first = 0.0, last = 0.0;
    for (std::size_t gi = 0; gi < o.sweep_graphs; ++gi) {
      const auto points = robustness_sweep({}, mix(o.seed, 3000 + gi));
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i && points[i].relevant_mass > points[i - 1].relevant_mass + 1e-12) ++increases;
        rows.push_back({{"p_noise", points[i].p_noise},
                        {"cross_edges", points[i].cross_edges},
                        {"mass", points[i].relevant_mass}});
      }
      first += points.front().relevant_mass;
      last += points.back().relevant_mass;
      graphs.push_back(std::move(rows));
    }
    const double n = static_cast<double>(o.sweep_graphs);
    c.passed = increases == 0;
    c.summary = fmt::format("{} graphs, mean relevant mass {:.4f} -> {:.4f}, {} increases", o.sweep_graphs,
                            first / n, last / n, increases);
    c.data = {{"graphs", graphs}};
    return c;
  }));
  return out;
}

}  // namespace atomgraph::theory
