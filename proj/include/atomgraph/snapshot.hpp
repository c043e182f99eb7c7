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

#include "atomgraph/graph.hpp"

namespace atomgraph {

inline constexpr int kSnapshotFormatVersion = 1;

// Snapshot directory layout:
//   manifest.json        format tag and version, dimension, hyperparameters,
//                        record counts, document fingerprints
//   entities.jsonl       one record per entity, sorted by id
//   atoms.jsonl          one record per atom, sorted by id
//   triples.jsonl        extraction order
//   containment.jsonl    (atom, entity, weight=1)
//   relevance.jsonl      (first, second, integer weight)
//   synonym.jsonl        (first, second, weight_offset)
//   floats.bin           little-endian IEEE-754 float64 values; records refer
//                        to them by element offset
// Saving requires a frozen graph. Output is byte-identical for equal graphs.
void save_snapshot(const AtomEntityGraph& graph, const std::filesystem::path& dir);

// Returns a frozen graph. Throws SnapshotError on version mismatch or any
// malformed / inconsistent record, naming the file and line.
AtomEntityGraph load_snapshot(const std::filesystem::path& dir);

}  // namespace atomgraph
