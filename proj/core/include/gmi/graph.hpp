// Copyright 2026 The gmi-graph Authors.
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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gmi/sparse.hpp"

namespace gmi {

/// Undirected edge, stored with u < v.
struct Edge {
  NodeId u;
  NodeId v;

  auto operator<=>(const Edge&) const = default;
};

inline Edge MakeEdge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

enum class SplitTag : uint8_t { kNone = 0, kTrain = 1, kVal = 2, kTest = 3 };

/// Bookkeeping from dataset parsing.
struct GraphMetadata {
  size_t raw_citations = 0;     // edge lines read from the cites file
  size_t dropped_edges = 0;     // referencing unknown node ids
  size_t duplicate_edges = 0;   // collapsed after symmetrization
  size_t self_loops = 0;        // dropped; normalization adds its own

  bool operator==(const GraphMetadata&) const = default;
};

/// Immutable sparse attributed graph.
///
/// Invariants (checked by Validate(), which every constructor calls):
///  - adjacency is square, symmetric in structure and value, with no diagonal;
///  - features has exactly num_nodes() rows;
///  - labels / split / node_ids, when present, have num_nodes() entries.
class Graph {
 public:
  Graph() = default;
  Graph(CsrMatrix adjacency, Matrix features);

  /// Symmetrizes and deduplicates; self-loops are dropped.
  static Graph FromEdges(NodeId num_nodes, std::span<const Edge> edges, Matrix features);

  NodeId num_nodes() const { return static_cast<NodeId>(adjacency_.rows); }
  size_t num_edges() const { return adjacency_.nnz() / 2; }
  int64_t feature_dim() const { return features_.cols(); }

  const CsrMatrix& adjacency() const { return adjacency_; }
  const Matrix& features() const { return features_; }

  std::span<const NodeId> Neighbors(NodeId i) const { return adjacency_.RowColumns(i); }
  int64_t Degree(NodeId i) const { return adjacency_.offsets[i + 1] - adjacency_.offsets[i]; }
  bool HasEdge(NodeId a, NodeId b) const;
  /// Each undirected edge once, u < v, in row-major order.
  std::vector<Edge> Edges() const;

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int32_t>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  int32_t num_classes() const { return static_cast<int32_t>(class_names_.size()); }

  bool has_split() const { return !split_.empty(); }
  const std::vector<SplitTag>& split() const { return split_; }
  std::vector<NodeId> NodesWith(SplitTag tag) const;

  /// External node identifiers; defaults to the decimal index.
  std::string NodeName(NodeId i) const;
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  const GraphMetadata& metadata() const { return metadata_; }

  Graph WithFeatures(Matrix features) const;
  Graph WithEdges(std::span<const Edge> edges) const;
  /// labels[i] is a class index into class_names, or -1 for unlabeled.
  Graph WithLabels(std::vector<int32_t> labels, std::vector<std::string> class_names) const;
  Graph WithSplit(std::vector<SplitTag> split) const;
  Graph WithNodeIds(std::vector<std::string> ids) const;
  Graph WithMetadata(GraphMetadata metadata) const;

  void Validate() const;

  bool operator==(const Graph& other) const;

 private:
  CsrMatrix adjacency_;
  Matrix features_;
  std::vector<int32_t> labels_;
  std::vector<std::string> class_names_;
  std::vector<SplitTag> split_;
  std::vector<std::string> node_ids_;
  GraphMetadata metadata_;
};

/// Closed one-hop neighborhoods: for node i, its neighbors plus i, sorted.
class SupportGraphIndex {
 public:
  SupportGraphIndex() = default;
  SupportGraphIndex(std::vector<int64_t> offsets, std::vector<NodeId> members);

  NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size()) - 1; }
  std::span<const NodeId> Members(NodeId i) const {
    return {members_.data() + offsets_[i], static_cast<size_t>(offsets_[i + 1] - offsets_[i])};
  }
  /// i_n: the size of node i's support graph.
  int64_t Size(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  size_t total_pairs() const { return members_.size(); }

 private:
  std::vector<int64_t> offsets_{0};
  std::vector<NodeId> members_;
};

struct EdgeSplit {
  Graph damaged;
  std::vector<Edge> removed_edges;
  double removal_ratio = 0.0;
};

// ---------------------------------------------------------------------------
// Operations

/// Parses `<id>\t<f_1>...\t<f_D>\t<label>` node lines and `<a>\t<b>` citation
/// lines. Edges are symmetrized and deduplicated; edges naming unknown ids are
/// dropped and counted in metadata(). Class indices follow first appearance.
Graph LoadCitationDataset(const std::filesystem::path& content_path,
                          const std::filesystem::path& cites_path);

/// One token per line in {train, val, test, none}.
std::vector<SplitTag> LoadSplitFile(const std::filesystem::path& path, NodeId num_nodes);
void SaveSplitFile(const std::filesystem::path& path, std::span<const SplitTag> split);

/// Each nonzero feature row scaled to sum to one; zero rows stay zero.
Graph RowNormalizeFeatures(const Graph& graph);

/// D^{-1/2} (A + I) D^{-1/2} with D the row sums of A + I.
CsrMatrix NormalizedAdjacency(const Graph& graph);

SupportGraphIndex BuildSupportIndex(const Graph& graph);

/// Removes round(ratio * |E|) edges, uniformly among those outside a seeded
/// random spanning forest, so every connected component stays connected.
/// Throws QuotaError (carrying the largest feasible ratio) when there are not
/// enough removable edges.
EdgeSplit RemoveEdges(const Graph& graph, double ratio, uint64_t seed);

/// Number of nodes reachable from `start` (including it).
NodeId BreadthFirstReach(const Graph& graph, NodeId start);
NodeId CountComponents(const Graph& graph);

/// Subgraph induced by `nodes` (in the given order); labels, split and node ids
/// are carried over.
Graph InducedSubgraph(const Graph& graph, std::span<const NodeId> nodes);

/// Applies new_index = permutation[old_index] to every node-indexed field.
Graph PermuteNodes(const Graph& graph, std::span<const NodeId> permutation);

// Binary graph cache: magic "GMIG", u32 version, then little-endian arrays.
void SaveGraphCache(const std::filesystem::path& path, const Graph& graph);
Graph LoadGraphCache(const std::filesystem::path& path);

}  // namespace gmi
