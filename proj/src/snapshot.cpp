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

#include "atomgraph/snapshot.hpp"

#include "atomgraph/text_util.hpp"
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "atomgraph/errors.hpp"

namespace atomgraph {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormatTag = "atomgraph-snapshot";

class FloatBlob {
 public:
  std::size_t append(std::span<const double> values) {
    const std::size_t offset = count_;
    for (double v : values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    count_ += values.size();
    return offset;
  }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
  std::size_t count_ = 0;
};

std::vector<double> read_floats(const std::string& blob, std::size_t offset, std::size_t n,
                                const std::string& where) {
  if ((offset + n) * 8 > blob.size()) {
    throw SnapshotError(where + ": float offset " + std::to_string(offset) + "+" + std::to_string(n) +
                        " is past the end of floats.bin");
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(blob[(offset + k) * 8 + i])) << (8 * i);
    }
    std::memcpy(&out[k], &bits, sizeof bits);
  }
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + p.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw SnapshotError("write to " + p.string() + " failed");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw SnapshotError("missing snapshot file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
void for_each_record(const fs::path& p, F&& f) {
  std::istringstream in(read_file(p));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = p.filename().string() + ":" + std::to_string(lineno);
    try {
      f(json::parse(line), where);
    } catch (const json::exception& e) {
      throw SnapshotError(where + ": malformed record: " + e.what());
    }
  }
}

std::string jsonl(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

void save_snapshot(const AtomEntityGraph& graph, const fs::path& dir) {
  if (!graph.frozen()) throw StateError("save_snapshot: graph must be frozen first");
  fs::create_directories(dir);
  FloatBlob blob;
  const std::size_t dim = graph.dimension();

  std::vector<json> entities;
  for (const auto& [id, e] : graph.entities()) {
    json off = nullptr;
    if (e.embedding) off = blob.append(e.embedding->values());
    entities.push_back({{"id", id},
                        {"canonical_name", e.canonical_name},
                        {"mention_count", e.mention_count},
                        {"embedding_offset", off}});
  }
  std::vector<json> atoms;
  for (const auto& [id, a] : graph.atoms()) {
    json off = nullptr;
    if (a.embedding) off = blob.append(a.embedding->values());
    json span = nullptr;
    if (a.span_hint) span = {a.span_hint->begin, a.span_hint->end};
    atoms.push_back({{"id", id},
                     {"text", a.text},
                     {"source_doc", a.source_doc},
                     {"chunk", a.chunk_index},
                     {"span", span},
                     {"entity_ids", a.entity_ids},
                     {"embedding_offset", off}});
  }
  std::vector<json> triples;
  for (const auto& t : graph.triples()) {
    triples.push_back({{"head", t.head}, {"relation", t.relation_label}, {"tail", t.tail}, {"source_doc", t.source_doc}});
  }
  std::vector<json> containment;
  for (const auto& c : graph.containment_edges()) {
    containment.push_back({{"atom", c.atom_id}, {"entity", c.entity_id}, {"weight", 1}});
  }
  std::vector<json> relevance;
  for (const auto& r : graph.relevance_edges()) {
    relevance.push_back({{"first", r.first}, {"second", r.second}, {"weight", r.weight}});
  }
  std::vector<json> synonym;
  for (const auto& s : graph.synonym_edges()) {
    const double w = s.weight;
    synonym.push_back({{"first", s.first}, {"second", s.second}, {"weight_offset", blob.append({&w, 1})}});
  }

  json hyper = json::object();
  if (const auto& sp = graph.synonym_params()) {
    hyper["synonymy_edge_topk"] = sp->k_neighbors;
    // Stored in the blob as well so the threshold round-trips exactly.
    hyper["synonymy_edge_sim_threshold_offset"] = blob.append({&sp->threshold, 1});
  }
  json manifest = {{"format", kFormatTag},
                   {"format_version", kSnapshotFormatVersion},
                   {"dimension", dim},
                   {"hyperparameters", hyper},
                   {"counts",
                    {{"entities", entities.size()},
                     {"atoms", atoms.size()},
                     {"triples", triples.size()},
                     {"containment", containment.size()},
                     {"relevance", relevance.size()},
                     {"synonym", synonym.size()}}},
                   {"documents", graph.document_fingerprints()},
                   {"float_encoding", "float64-le"}};

  write_file(dir / "entities.jsonl", jsonl(entities));
  write_file(dir / "atoms.jsonl", jsonl(atoms));
  write_file(dir / "triples.jsonl", jsonl(triples));
  write_file(dir / "containment.jsonl", jsonl(containment));
  write_file(dir / "relevance.jsonl", jsonl(relevance));
  write_file(dir / "synonym.jsonl", jsonl(synonym));
  write_file(dir / "floats.bin", blob.bytes());
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

class SnapshotReader {
 public:
  static AtomEntityGraph read(const fs::path& dir) {
    json manifest;
    try {
      manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
      throw SnapshotError(std::string("manifest.json is malformed: ") + e.what());
    }
    if (manifest.value("format", "") != kFormatTag) throw SnapshotError("not a graph snapshot: " + dir.string());
    const int version = manifest.value("format_version", -1);
    if (version != kSnapshotFormatVersion) {
      throw SnapshotError("snapshot format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kSnapshotFormatVersion) + ")");
    }
    const std::string blob = read_file(dir / "floats.bin");
    if (blob.size() % 8 != 0) throw SnapshotError("floats.bin size is not a multiple of 8");
    const std::size_t dim = manifest.at("dimension").get<std::size_t>();

    AtomEntityGraph g;
    g.dimension_ = dim;
    auto embedding_at = [&](const json& off, const std::string& where) -> std::optional<Embedding> {
      if (off.is_null()) return std::nullopt;
      if (dim == 0) throw SnapshotError(where + ": embedding present but dimension is 0");
      try {
        return Embedding::from_unit(read_floats(blob, off.get<std::size_t>(), dim, where));
      } catch (const InvalidArgument& e) {
        throw SnapshotError(where + ": " + e.what());
      }
    };

    for_each_record(dir / "entities.jsonl", [&](const json& r, const std::string& where) {
      EntityNode e;
      e.id = r.at("id").get<std::string>();
      e.canonical_name = r.at("canonical_name").get<std::string>();
      e.mention_count = r.at("mention_count").get<std::uint64_t>();
      e.embedding = embedding_at(r.at("embedding_offset"), where);
      if (e.canonical_name.empty()) throw SnapshotError(where + ": empty canonical name");
      if (!g.name_index_.emplace(normalize_name(e.canonical_name), e.id).second) {
        throw SnapshotError(where + ": duplicate canonical name '" + e.canonical_name + "'");
      }
      if (!g.entities_.emplace(e.id, e).second) throw SnapshotError(where + ": duplicate entity id '" + e.id + "'");
    });
    auto require_entity = [&](const std::string& id, const std::string& where) {
      if (g.entities_.count(id) == 0) throw SnapshotError(where + ": unknown entity '" + id + "'");
    };
    for_each_record(dir / "atoms.jsonl", [&](const json& r, const std::string& where) {
      KnowledgeAtom a;
      a.id = r.at("id").get<std::string>();
      a.text = r.at("text").get<std::string>();
      a.source_doc = r.at("source_doc").get<std::string>();
      a.chunk_index = r.at("chunk").get<std::uint32_t>();
      if (!r.at("span").is_null()) a.span_hint = SpanHint{r["span"].at(0).get<std::size_t>(), r["span"].at(1).get<std::size_t>()};
      a.entity_ids = r.at("entity_ids").get<std::vector<std::string>>();
      a.embedding = embedding_at(r.at("embedding_offset"), where);
      for (const auto& e : a.entity_ids) require_entity(e, where);
      if (!std::is_sorted(a.entity_ids.begin(), a.entity_ids.end()) ||
          std::adjacent_find(a.entity_ids.begin(), a.entity_ids.end()) != a.entity_ids.end()) {
        throw SnapshotError(where + ": entity_ids must be sorted and unique");
      }
      if (!g.atoms_.emplace(a.id, a).second) throw SnapshotError(where + ": duplicate atom id '" + a.id + "'");
    });
    for_each_record(dir / "triples.jsonl", [&](const json& r, const std::string& where) {
      Triple t{r.at("head").get<std::string>(), r.at("relation").get<std::string>(), r.at("tail").get<std::string>(),
               r.at("source_doc").get<std::string>()};
      require_entity(t.head, where);
      require_entity(t.tail, where);
      g.triples_.push_back(std::move(t));
    });
    std::size_t containment = 0;
    for_each_record(dir / "containment.jsonl", [&](const json& r, const std::string& where) {
      const auto atom = r.at("atom").get<std::string>();
      const auto entity = r.at("entity").get<std::string>();
      auto it = g.atoms_.find(atom);
      if (it == g.atoms_.end() ||
          !std::binary_search(it->second.entity_ids.begin(), it->second.entity_ids.end(), entity)) {
        throw SnapshotError(where + ": containment edge (" + atom + ", " + entity + ") has no matching atom mention");
      }
      if (r.at("weight") != 1) throw SnapshotError(where + ": containment weight must be 1");
      ++containment;
    });
    if (containment != g.containment_count()) {
      throw SnapshotError("containment.jsonl lists " + std::to_string(containment) + " edges, atoms imply " +
                          std::to_string(g.containment_count()));
    }
    for_each_record(dir / "relevance.jsonl", [&](const json& r, const std::string& where) {
      RelevanceEdge e{r.at("first").get<std::string>(), r.at("second").get<std::string>(),
                      r.at("weight").get<std::uint32_t>()};
      require_entity(e.first, where);
      require_entity(e.second, where);
      if (!(e.first < e.second) || e.weight == 0) throw SnapshotError(where + ": invalid relevance edge");
      g.relevance_.push_back(std::move(e));
    });
    for_each_record(dir / "synonym.jsonl", [&](const json& r, const std::string& where) {
      SynonymEdge e{r.at("first").get<std::string>(), r.at("second").get<std::string>(),
                    read_floats(blob, r.at("weight_offset").get<std::size_t>(), 1, where)[0]};
      require_entity(e.first, where);
      require_entity(e.second, where);
      if (!(e.first < e.second)) throw SnapshotError(where + ": invalid synonym edge");
      g.synonym_.push_back(std::move(e));
    });
    const auto& hyper = manifest.at("hyperparameters");
    if (hyper.contains("synonymy_edge_topk")) {
      SynonymParams sp;
      sp.k_neighbors = hyper["synonymy_edge_topk"].get<std::size_t>();
      sp.threshold = read_floats(blob, hyper.at("synonymy_edge_sim_threshold_offset").get<std::size_t>(), 1,
                                 "manifest.json")[0];
      g.synonym_params_ = sp;
      for (const auto& s : g.synonym_) {
        if (s.weight < sp.threshold) throw SnapshotError("synonym edge below threshold: " + s.first + "-" + s.second);
      }
    }
    g.doc_fingerprints_ = manifest.value("documents", std::map<std::string, std::string>{});
    g.freeze();
    return g;
  }
};

AtomEntityGraph load_snapshot(const fs::path& dir) {
  try {
    return SnapshotReader::read(dir);
  } catch (const json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace atomgraph
