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

// Brute-force references shared by the unit tests and the acceptance run.

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/encoder.hpp"
#include "atomgraph/graph.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/text_util.hpp"

namespace testing {

inline const std::vector<std::string> kNames = {
    "Marie Curie", "Madame Marie Curie", "marie  curie", "Pierre Curie", "Paris", "Paris France", "radium",
    "Radium Institute", "the Radium Institute", "polonium", "Poland", "Warsaw", "Sorbonne", "the Sorbonne",
    "Nobel Prize", "Nobel Prizes", "Henri Becquerel", "Becquerel", "uranium", "uranium ore", "physics", "chemistry"};
inline const std::vector<std::string> kLabels = {"discovered", "won", "married", "born in", "worked at",
                                                 "named after"};

struct Generated {
  std::vector<std::pair<atomgraph::CorpusDocument, atomgraph::ExtractionRecord>> docs;
};

inline Generated random_extractions(std::mt19937_64& rng) {
  using namespace atomgraph;
  Generated g;
  const std::size_t ndocs = 1 + rng() % 4;
  for (std::size_t d = 0; d < ndocs; ++d) {
    ExtractionRecord rec;
    rec.doc_id = "doc" + std::to_string(d);
    std::set<std::string> seen;
    const std::size_t nent = 2 + rng() % 8;
    for (std::size_t i = 0; i < nent; ++i) {
      const auto& n = kNames[rng() % kNames.size()];
      if (seen.insert(normalize_name(n)).second) rec.entities.push_back(n);
    }
    const std::size_t natoms = 1 + rng() % 6;
    for (std::size_t a = 0; a < natoms; ++a) {
      ExtractedAtom atom;
      atom.text = "fact " + std::to_string(d) + "." + std::to_string(a);
      const std::size_t k = 1 + rng() % 3;
      for (std::size_t i = 0; i < k; ++i) atom.entities.push_back(rec.entities[rng() % rec.entities.size()]);
      rec.atoms.push_back(atom);
    }
    const std::size_t ntriples = rng() % 10;
    for (std::size_t t = 0; t < ntriples; ++t) {
      rec.triples.push_back({rec.entities[rng() % rec.entities.size()], kLabels[rng() % kLabels.size()],
                             rec.entities[rng() % rec.entities.size()]});
    }
    CorpusDocument doc{rec.doc_id, "placeholder text for " + rec.doc_id, {}};
    g.docs.emplace_back(doc, rec);
  }
  return g;
}

inline atomgraph::AtomEntityGraph assemble(const Generated& g, const atomgraph::Encoder& enc,
                                           const atomgraph::SynonymParams& params) {
  using namespace atomgraph;
  AtomEntityGraph graph;
  for (const auto& [doc, rec] : g.docs) add_records(graph, doc.doc_id, chunk(doc), {rec});
  embed_graph(graph, enc);
  graph.build_relevance_edges();
  graph.build_synonym_edges(params);
  return graph;
}

// One unit edge per distinct entity an atom mentions.
inline std::size_t containment_oracle(const Generated& g) {
  std::size_t n = 0;
  for (const auto& [doc, rec] : g.docs) {
    for (const auto& a : rec.atoms) {
      std::set<std::string> ids;
      for (const auto& name : a.entities) ids.insert(atomgraph::normalize_name(name));
      n += ids.size();
    }
  }
  return n;
}

// Distinct labels per unordered entity pair, self pairs excluded.
inline std::map<std::pair<std::string, std::string>, std::set<std::string>> relevance_oracle(const Generated& g) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> labels;
  for (const auto& [doc, rec] : g.docs) {
    for (const auto& t : rec.triples) {
      auto a = atomgraph::entity_id_for(t[0]), b = atomgraph::entity_id_for(t[2]);
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      labels[{a, b}].insert(t[1]);
    }
  }
  return labels;
}

// Every entity pair whose name encodings reach the threshold, in id order.
inline std::vector<std::pair<std::string, std::string>> synonym_oracle(const atomgraph::AtomEntityGraph& graph,
                                                                       const atomgraph::Encoder& enc,
                                                                       double threshold) {
  std::vector<std::pair<std::string, std::vector<double>>> ents;
  for (const auto& [id, e] : graph.entities()) {
    const auto emb = enc.encode(e.canonical_name);
    const auto v = emb.values();
    ents.emplace_back(id, std::vector<double>(v.begin(), v.end()));
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < ents.size(); ++i) {
    for (std::size_t j = i + 1; j < ents.size(); ++j) {
      const auto& a = ents[i].second;
      const auto& b = ents[j].second;
      double dot = 0, na = 0, nb = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
      }
      if (dot / std::sqrt(na * nb) >= threshold) out.emplace_back(ents[i].first, ents[j].first);
    }
  }
  return out;
}

// ||rho pi + (1 - rho) P^T r - r||_1 with dangling mass sent to pi, straight from the adjacency lists.
inline double ppr_residual_oracle(const atomgraph::CsrGraph& g, const std::vector<double>& pi,
                                  const std::vector<double>& r, double rho) {
  const std::size_t n = g.node_count();
  std::vector<double> next(n, 0.0);
  double dangling = 0.0;
  for (atomgraph::NodeIndex u = 0; u < n; ++u) {
    double d = 0.0;
    for (double w : g.weights(u)) d += w;
    if (d <= 0.0) {
      dangling += r[u];
      continue;
    }
    const auto nb = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) next[nb[i]] += r[u] * ws[i] / d;
  }
  double res = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    res += std::abs(rho * pi[v] + (1.0 - rho) * (next[v] + dangling * pi[v]) - r[v]);
  }
  return res;
}

}  // namespace testing
