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

#include "atomgraph/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "atomgraph/errors.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

namespace {

using nlohmann::json;

// Canonical serialization of one add_document_extraction payload, used to
// recognize byte-identical re-ingestion.
std::string payload_fingerprint(const std::vector<EntityNode>& entities,
                                const std::vector<KnowledgeAtom>& atoms,
                                const std::vector<Triple>& triples) {
  json j = json::array();
  for (const auto& e : entities) {
    json emb = nullptr;
    if (e.embedding) emb = std::vector<double>(e.embedding->values().begin(), e.embedding->values().end());
    j.push_back({"e", e.id, e.canonical_name, emb});
  }
  for (const auto& a : atoms) {
    json span = nullptr;
    if (a.span_hint) span = {a.span_hint->begin, a.span_hint->end};
    json emb = nullptr;
    if (a.embedding) emb = std::vector<double>(a.embedding->values().begin(), a.embedding->values().end());
    j.push_back({"a", a.id, a.text, a.source_doc, a.chunk_index, span, a.entity_ids, emb});
  }
  for (const auto& t : triples) j.push_back({"t", t.head, t.relation_label, t.tail, t.source_doc});
  return hex64(fnv1a64(j.dump()));
}

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

AtomEntityGraph::AtomEntityGraph(const AtomEntityGraph& other)
    : entities_(other.entities_),
      atoms_(other.atoms_),
      name_index_(other.name_index_),
      triples_(other.triples_),
      relevance_(other.relevance_),
      synonym_(other.synonym_),
      synonym_params_(other.synonym_params_),
      doc_fingerprints_(other.doc_fingerprints_),
      dimension_(other.dimension_) {
  if (other.frozen_) freeze();
}

AtomEntityGraph& AtomEntityGraph::operator=(const AtomEntityGraph& other) {
  if (this != &other) {
    AtomEntityGraph tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

void AtomEntityGraph::require_mutable(const char* op) const {
  if (frozen_) throw StateError(std::string(op) + ": graph is frozen");
}

void AtomEntityGraph::require_frozen(const char* op) const {
  if (!frozen_) throw StateError(std::string(op) + ": graph must be frozen first");
}

void AtomEntityGraph::check_dimension(const Embedding& e, const std::string& owner) {
  if (dimension_ == 0) {
    dimension_ = e.dimension();
  } else if (e.dimension() != dimension_) {
    throw GraphError("embedding of '" + owner + "' has dimension " + std::to_string(e.dimension()) +
                     ", graph uses " + std::to_string(dimension_));
  }
}

void AtomEntityGraph::add_document_extraction(const std::string& doc_id,
                                              std::vector<EntityNode> entities,
                                              std::vector<KnowledgeAtom> atoms,
                                              std::vector<Triple> triples) {
  require_mutable("add_document_extraction");
  const std::string fingerprint = payload_fingerprint(entities, atoms, triples);
  if (auto it = doc_fingerprints_.find(doc_id); it != doc_fingerprints_.end() && it->second == fingerprint) {
    return;
  }

  // Resolve incoming entity ids against the graph and against each other.
  std::map<std::string, std::string> remap;  // incoming id -> graph id
  std::map<std::string, std::string> pending_names;  // normalized name -> id, new in this call
  std::vector<EntityNode> fresh;
  std::size_t dim = dimension_;
  auto check_dim = [&](const std::optional<Embedding>& e, const std::string& owner) {
    if (!e) return;
    if (dim == 0) dim = e->dimension();
    if (e->dimension() != dim) {
      throw GraphError("embedding of '" + owner + "' has dimension " + std::to_string(e->dimension()) +
                       ", expected " + std::to_string(dim));
    }
  };
  for (auto& e : entities) {
    if (e.id.empty()) throw GraphError("entity with empty id in document '" + doc_id + "'");
    const std::string key = normalize_name(e.canonical_name);
    if (key.empty()) throw GraphError("entity '" + e.id + "' has an empty canonical name");
    check_dim(e.embedding, e.id);
    if (auto hit = name_index_.find(key); hit != name_index_.end()) {
      remap[e.id] = hit->second;
      continue;
    }
    if (auto hit = pending_names.find(key); hit != pending_names.end()) {
      remap[e.id] = hit->second;
      continue;
    }
    if (entities_.count(e.id) != 0 || remap.count(e.id) != 0) {
      throw GraphError("entity id '" + e.id + "' is already bound to a different canonical name");
    }
    remap[e.id] = e.id;
    pending_names[key] = e.id;
    fresh.push_back(std::move(e));
  }
  auto resolve = [&](const std::string& id) -> std::string {
    if (auto it = remap.find(id); it != remap.end()) return it->second;
    if (entities_.count(id) != 0) return id;
    throw GraphError("unknown entity id '" + id + "' referenced in document '" + doc_id + "'");
  };

  std::set<std::string> seen_atoms;
  for (auto& a : atoms) {
    if (a.id.empty()) throw GraphError("atom with empty id in document '" + doc_id + "'");
    if (trim(a.text).empty()) throw GraphError("atom '" + a.id + "' has empty text");
    if (atoms_.count(a.id) != 0 || !seen_atoms.insert(a.id).second) {
      throw GraphError("duplicate atom id '" + a.id + "'");
    }
    if (a.span_hint && a.span_hint->end < a.span_hint->begin) {
      throw GraphError("atom '" + a.id + "' has an inverted span hint");
    }
    check_dim(a.embedding, a.id);
    std::vector<std::string> ids;
    ids.reserve(a.entity_ids.size());
    for (const auto& id : a.entity_ids) ids.push_back(resolve(id));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    a.entity_ids = std::move(ids);
    if (a.source_doc.empty()) a.source_doc = doc_id;
  }
  for (auto& t : triples) {
    if (trim(t.relation_label).empty()) {
      throw GraphError("triple (" + t.head + ", ?, " + t.tail + ") has an empty relation label");
    }
    t.head = resolve(t.head);
    t.tail = resolve(t.tail);
    if (t.source_doc.empty()) t.source_doc = doc_id;
  }

  // Commit.
  dimension_ = dim;
  std::set<std::string> mentioned;
  for (const auto& [incoming, target] : remap) mentioned.insert(target);
  for (auto& e : fresh) {
    name_index_[normalize_name(e.canonical_name)] = e.id;
    e.mention_count = 0;
    entities_.emplace(e.id, std::move(e));
  }
  for (const auto& [incoming, target] : remap) {
    auto& node = entities_.at(target);
    if (!node.embedding) {
      for (const auto& e : entities) {
        if (e.id == incoming && e.embedding) node.embedding = e.embedding;
      }
    }
  }
  for (const auto& id : mentioned) entities_.at(id).mention_count += 1;
  for (auto& a : atoms) atoms_.emplace(a.id, std::move(a));
  for (auto& t : triples) triples_.push_back(std::move(t));
  doc_fingerprints_[doc_id] = fingerprint;
}

void AtomEntityGraph::set_entity_embedding(const std::string& entity_id, Embedding embedding) {
  require_mutable("set_entity_embedding");
  auto it = entities_.find(entity_id);
  if (it == entities_.end()) throw GraphError("unknown entity id '" + entity_id + "'");
  check_dimension(embedding, entity_id);
  it->second.embedding = std::move(embedding);
}

void AtomEntityGraph::set_atom_embedding(const std::string& atom_id, Embedding embedding) {
  require_mutable("set_atom_embedding");
  auto it = atoms_.find(atom_id);
  if (it == atoms_.end()) throw GraphError("unknown atom id '" + atom_id + "'");
  check_dimension(embedding, atom_id);
  it->second.embedding = std::move(embedding);
}

const std::vector<RelevanceEdge>& AtomEntityGraph::build_relevance_edges() {
  require_mutable("build_relevance_edges");
  std::map<std::pair<std::string, std::string>, std::set<std::string>> labels;
  for (const auto& t : triples_) {
    if (t.self_relation()) continue;
    labels[ordered(t.head, t.tail)].insert(t.relation_label);
  }
  relevance_.clear();
  relevance_.reserve(labels.size());
  for (const auto& [pair, set] : labels) {
    relevance_.push_back({pair.first, pair.second, static_cast<std::uint32_t>(set.size())});
  }
  return relevance_;
}

const std::vector<SynonymEdge>& AtomEntityGraph::build_synonym_edges(const SynonymParams& params) {
  require_mutable("build_synonym_edges");
  if (params.k_neighbors == 0) throw InvalidArgument("synonym k_neighbors must be >= 1");
  std::vector<const EntityNode*> nodes;
  nodes.reserve(entities_.size());
  for (const auto& [id, e] : entities_) {
    if (!e.embedding) throw GraphError("entity '" + id + "' has no embedding");
    nodes.push_back(&e);
  }
  const std::size_t n = nodes.size();
  std::map<std::pair<std::size_t, std::size_t>, double> chosen;
  std::vector<std::size_t> order;
  std::vector<double> sims(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Always multiply in (lower, higher) order so both directions agree bitwise.
      sims[j] = i == j ? 0.0
                       : cosine(*nodes[std::min(i, j)]->embedding, *nodes[std::max(i, j)]->embedding);
    }
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    const std::size_t k = std::min(params.k_neighbors, order.size());
    // Entities are in ascending id order, so index order is id order.
    auto better = [&](std::size_t a, std::size_t b) {
      return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
    };
    if (k < order.size()) {
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
      order.resize(k);
    }
    for (std::size_t j : order) {
      if (sims[j] >= params.threshold) chosen[{std::min(i, j), std::max(i, j)}] = sims[j];
    }
  }
  synonym_.clear();
  synonym_.reserve(chosen.size());
  for (const auto& [pair, w] : chosen) {
    synonym_.push_back({nodes[pair.first]->id, nodes[pair.second]->id, w});
  }
  synonym_params_ = params;
  return synonym_;
}

std::vector<ContainmentEdge> AtomEntityGraph::containment_edges() const {
  std::vector<ContainmentEdge> out;
  out.reserve(containment_count());
  for (const auto& [id, a] : atoms_) {
    for (const auto& e : a.entity_ids) out.push_back({id, e, 1.0});
  }
  return out;
}

std::size_t AtomEntityGraph::containment_count() const {
  std::size_t n = 0;
  for (const auto& [id, a] : atoms_) n += a.entity_ids.size();
  return n;
}

std::optional<std::string> AtomEntityGraph::find_entity_by_name(const std::string& name) const {
  auto it = name_index_.find(normalize_name(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

void AtomEntityGraph::freeze() {
  if (frozen_) return;
  build_topology();
  frozen_ = true;
}

void AtomEntityGraph::build_topology() {
  entity_by_index_.clear();
  atom_by_index_.clear();
  index_.clear();
  NodeIndex next = 0;
  for (const auto& [id, e] : entities_) {
    entity_by_index_.push_back(&e);
    index_.emplace(id, next++);
  }
  for (const auto& [id, a] : atoms_) {
    atom_by_index_.push_back(&a);
    index_.emplace(id, next++);
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(containment_count() + relevance_.size() + synonym_.size());
  for (const auto& [id, a] : atoms_) {
    for (const auto& e : a.entity_ids) edges.push_back({index_.at(id), index_.at(e), 1.0});
  }
  for (const auto& r : relevance_) {
    edges.push_back({index_.at(r.first), index_.at(r.second), static_cast<double>(r.weight)});
  }
  for (const auto& s : synonym_) edges.push_back({index_.at(s.first), index_.at(s.second), s.weight});
  topology_ = CsrGraph::from_edges(next, edges);
}

GraphStats AtomEntityGraph::compute_stats() const {
  require_frozen("compute_stats");
  GraphStats s;
  s.entity_count = entities_.size();
  s.atom_count = atoms_.size();
  s.node_count = s.entity_count + s.atom_count;
  s.edge_count_by_kind = {containment_count(), relevance_.size(), synonym_.size()};
  s.avg_degree = topology_.average_degree();
  s.avg_clustering = topology_.average_clustering();
  return s;
}

const CsrGraph& AtomEntityGraph::topology() const {
  require_frozen("topology");
  return topology_;
}

const std::string& AtomEntityGraph::node_id(NodeIndex v) const {
  require_frozen("node_id");
  return kind(v) == NodeKind::kEntity ? entity_by_index_.at(v)->id
                                      : atom_by_index_.at(v - entities_.size())->id;
}

std::optional<NodeIndex> AtomEntityGraph::index_of(const std::string& id) const {
  require_frozen("index_of");
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const KnowledgeAtom& AtomEntityGraph::atom_at(NodeIndex v) const {
  require_frozen("atom_at");
  if (kind(v) != NodeKind::kAtom) throw InvalidArgument("node " + std::to_string(v) + " is not an atom");
  return *atom_by_index_.at(v - entities_.size());
}

const EntityNode& AtomEntityGraph::entity_at(NodeIndex v) const {
  require_frozen("entity_at");
  if (kind(v) != NodeKind::kEntity) throw InvalidArgument("node " + std::to_string(v) + " is not an entity");
  return *entity_by_index_.at(v);
}

bool operator==(const AtomEntityGraph& a, const AtomEntityGraph& b) {
  return a.dimension_ == b.dimension_ && a.entities_ == b.entities_ && a.atoms_ == b.atoms_ &&
         a.triples_ == b.triples_ && a.relevance_ == b.relevance_ && a.synonym_ == b.synonym_;
}

}  // namespace atomgraph
