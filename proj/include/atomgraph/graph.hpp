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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/embedding.hpp"

namespace atomgraph {

// Half-open character range [begin, end) in the source document.
struct SpanHint {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool overlaps(const SpanHint& o) const { return begin < o.end && o.begin < end; }
  friend bool operator==(const SpanHint&, const SpanHint&) = default;
};

struct EntityNode {
  std::string id;
  std::string canonical_name;
  std::optional<Embedding> embedding;
  std::uint64_t mention_count = 0;
  friend bool operator==(const EntityNode&, const EntityNode&) = default;
};

struct KnowledgeAtom {
  std::string id;
  std::string text;
  std::string source_doc;
  std::uint32_t chunk_index = 0;
  std::optional<SpanHint> span_hint;
  std::vector<std::string> entity_ids;  // sorted, unique
  std::optional<Embedding> embedding;
  friend bool operator==(const KnowledgeAtom&, const KnowledgeAtom&) = default;
};

struct Triple {
  std::string head;
  std::string relation_label;
  std::string tail;
  std::string source_doc;
  bool self_relation() const { return head == tail; }
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct ContainmentEdge {
  std::string atom_id;
  std::string entity_id;
  double weight = 1.0;
  friend bool operator==(const ContainmentEdge&, const ContainmentEdge&) = default;
};

// Entity-entity edges are stored once with first < second.
struct RelevanceEdge {
  std::string first;
  std::string second;
  std::uint32_t weight = 0;
  friend bool operator==(const RelevanceEdge&, const RelevanceEdge&) = default;
};

struct SynonymEdge {
  std::string first;
  std::string second;
  double weight = 0.0;
  friend bool operator==(const SynonymEdge&, const SynonymEdge&) = default;
};

struct SynonymParams {
  std::size_t k_neighbors = 2047;
  double threshold = 0.8;
  friend bool operator==(const SynonymParams&, const SynonymParams&) = default;
};

enum class NodeKind : std::uint8_t { kEntity, kAtom };

struct EdgeCounts {
  std::size_t containment = 0;
  std::size_t relevance = 0;
  std::size_t synonym = 0;
  std::size_t total() const { return containment + relevance + synonym; }
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t entity_count = 0;
  std::size_t atom_count = 0;
  EdgeCounts edge_count_by_kind;
  double avg_degree = 0.0;
  double avg_clustering = 0.0;
};

// Heterogeneous atom-entity graph. Built by a single writer, then frozen;
// a frozen graph is immutable and exposes a CSR topology in which entities
// occupy node indices [0, entity_count) and atoms follow, each block sorted
// by id.
class AtomEntityGraph {
 public:
  AtomEntityGraph() = default;
  AtomEntityGraph(const AtomEntityGraph& other);
  AtomEntityGraph& operator=(const AtomEntityGraph& other);
  AtomEntityGraph(AtomEntityGraph&&) noexcept = default;
  AtomEntityGraph& operator=(AtomEntityGraph&&) noexcept = default;

  // Inserts one document's extraction. Entities are merged with existing ones
  // by normalized canonical name; incoming ids that merge are remapped in the
  // atoms and triples of this call. Re-ingesting a document with a
  // byte-identical payload is a no-op. Validation happens before any
  // mutation, so a rejected call leaves the graph untouched.
  void add_document_extraction(const std::string& doc_id, std::vector<EntityNode> entities,
                               std::vector<KnowledgeAtom> atoms, std::vector<Triple> triples);

  void set_entity_embedding(const std::string& entity_id, Embedding embedding);
  void set_atom_embedding(const std::string& atom_id, Embedding embedding);

  // Recomputed from scratch: weight(e, e') = number of distinct relation
  // labels over triples in either direction. Self-relations do not produce
  // edges.
  const std::vector<RelevanceEdge>& build_relevance_edges();

  // For each entity, its k nearest entities by cosine (ties by ascending id)
  // become synonym edges when cos >= threshold. The union over all entities
  // is kept, so the relation is symmetric.
  const std::vector<SynonymEdge>& build_synonym_edges(const SynonymParams& params);

  // Idempotent.
  void freeze();
  bool frozen() const { return frozen_; }

  GraphStats compute_stats() const;

  // Accessors. Maps are ordered by id.
  const std::map<std::string, EntityNode>& entities() const { return entities_; }
  const std::map<std::string, KnowledgeAtom>& atoms() const { return atoms_; }
  const std::vector<Triple>& triples() const { return triples_; }
  const std::vector<RelevanceEdge>& relevance_edges() const { return relevance_; }
  const std::vector<SynonymEdge>& synonym_edges() const { return synonym_; }
  std::vector<ContainmentEdge> containment_edges() const;
  std::size_t containment_count() const;
  const std::optional<SynonymParams>& synonym_params() const { return synonym_params_; }
  const std::map<std::string, std::string>& document_fingerprints() const { return doc_fingerprints_; }
  std::size_t dimension() const { return dimension_; }
  std::optional<std::string> find_entity_by_name(const std::string& name) const;

  // Frozen-only views.
  const CsrGraph& topology() const;
  std::size_t node_count() const { return entities_.size() + atoms_.size(); }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t atom_count() const { return atoms_.size(); }
  NodeKind kind(NodeIndex v) const { return v < entities_.size() ? NodeKind::kEntity : NodeKind::kAtom; }
  const std::string& node_id(NodeIndex v) const;
  std::optional<NodeIndex> index_of(const std::string& id) const;
  const KnowledgeAtom& atom_at(NodeIndex v) const;
  const EntityNode& entity_at(NodeIndex v) const;

  // Structural equality: nodes, embeddings, triples and all three edge
  // families. Freeze state is not compared.
  friend bool operator==(const AtomEntityGraph& a, const AtomEntityGraph& b);

 private:
  friend class SnapshotReader;

  void require_mutable(const char* op) const;
  void require_frozen(const char* op) const;
  void check_dimension(const Embedding& e, const std::string& owner);
  void build_topology();

  std::map<std::string, EntityNode> entities_;
  std::map<std::string, KnowledgeAtom> atoms_;
  std::map<std::string, std::string> name_index_;  // normalized name -> entity id
  std::vector<Triple> triples_;
  std::vector<RelevanceEdge> relevance_;
  std::vector<SynonymEdge> synonym_;
  std::optional<SynonymParams> synonym_params_;
  std::map<std::string, std::string> doc_fingerprints_;
  std::size_t dimension_ = 0;

  bool frozen_ = false;
  CsrGraph topology_;
  std::vector<const EntityNode*> entity_by_index_;
  std::vector<const KnowledgeAtom*> atom_by_index_;
  std::unordered_map<std::string, NodeIndex> index_;
};

}  // namespace atomgraph
