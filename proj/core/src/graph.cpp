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

#include "gmi/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "gmi/error.hpp"
#include "gmi/rng.hpp"

namespace gmi {
namespace {

CsrMatrix SymmetricAdjacency(NodeId n, std::span<const Edge> edges, size_t* duplicates,
                             size_t* self_loops) {
  std::vector<Edge> unique;
  unique.reserve(edges.size());
  size_t loops = 0;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") references a node outside [0, " + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      ++loops;
      continue;
    }
    unique.push_back(MakeEdge(e.u, e.v));
  }
  std::sort(unique.begin(), unique.end());
  const size_t before = unique.size();
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (duplicates) *duplicates = before - unique.size();
  if (self_loops) *self_loops = loops;

  std::vector<Triplet> triplets;
  triplets.reserve(unique.size() * 2);
  for (const Edge& e : unique) {
    triplets.push_back({e.u, e.v, 1.0});
    triplets.push_back({e.v, e.u, 1.0});
  }
  return CsrMatrix::FromTriplets(n, n, std::move(triplets));
}

// Union-find over node indices, used for the spanning forest.
class DisjointSets {
 public:
  explicit DisjointSets(NodeId n) : parent_(static_cast<size_t>(n)), rank_(static_cast<size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  NodeId Find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool Union(NodeId a, NodeId b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<NodeId> parent_;
  std::vector<uint8_t> rank_;
};

}  // namespace

Graph::Graph(CsrMatrix adjacency, Matrix features)
    : adjacency_(std::move(adjacency)), features_(std::move(features)) {
  Validate();
}

Graph Graph::FromEdges(NodeId num_nodes, std::span<const Edge> edges, Matrix features) {
  GraphMetadata meta;
  CsrMatrix adj = SymmetricAdjacency(num_nodes, edges, &meta.duplicate_edges, &meta.self_loops);
  Graph g(std::move(adj), std::move(features));
  g.metadata_ = meta;
  return g;
}

bool Graph::HasEdge(NodeId a, NodeId b) const {
  const auto cols = Neighbors(a);
  return std::binary_search(cols.begin(), cols.end(), b);
}

std::vector<Edge> Graph::Edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId i = 0; i < num_nodes(); ++i) {
    for (NodeId j : Neighbors(i)) {
      if (i < j) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<NodeId> Graph::NodesWith(SplitTag tag) const {
  std::vector<NodeId> out;
  for (size_t i = 0; i < split_.size(); ++i) {
    if (split_[i] == tag) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::string Graph::NodeName(NodeId i) const {
  return node_ids_.empty() ? std::to_string(i) : node_ids_[static_cast<size_t>(i)];
}

Graph Graph::WithFeatures(Matrix features) const {
  Graph g = *this;
  g.features_ = std::move(features);
  g.Validate();
  return g;
}

Graph Graph::WithEdges(std::span<const Edge> edges) const {
  Graph g = *this;
  g.adjacency_ = SymmetricAdjacency(num_nodes(), edges, nullptr, nullptr);
  g.Validate();
  return g;
}

Graph Graph::WithLabels(std::vector<int32_t> labels, std::vector<std::string> class_names) const {
  Graph g = *this;
  g.labels_ = std::move(labels);
  g.class_names_ = std::move(class_names);
  g.Validate();
  return g;
}

Graph Graph::WithSplit(std::vector<SplitTag> split) const {
  Graph g = *this;
  g.split_ = std::move(split);
  g.Validate();
  return g;
}

Graph Graph::WithNodeIds(std::vector<std::string> ids) const {
  Graph g = *this;
  g.node_ids_ = std::move(ids);
  g.Validate();
  return g;
}

Graph Graph::WithMetadata(GraphMetadata metadata) const {
  Graph g = *this;
  g.metadata_ = metadata;
  return g;
}

void Graph::Validate() const {
  adjacency_.Validate();
  if (adjacency_.rows != adjacency_.cols) throw ValidationError("adjacency must be square");
  const NodeId n = num_nodes();
  for (NodeId i = 0; i < n; ++i) {
    const auto cols = adjacency_.RowColumns(i);
    const auto vals = adjacency_.RowValues(i);
    for (size_t k = 0; k < cols.size(); ++k) {
      const NodeId j = cols[k];
      if (j == i) throw ValidationError("self-loop stored at node " + std::to_string(i));
      const auto back = adjacency_.RowColumns(j);
      auto it = std::lower_bound(back.begin(), back.end(), i);
      if (it == back.end() || *it != i ||
          adjacency_.RowValues(j)[static_cast<size_t>(it - back.begin())] != vals[k]) {
        throw ValidationError("adjacency not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
  }
  if (features_.rows() != n) {
    throw ValidationError("features have " + std::to_string(features_.rows()) + " rows for " +
                          std::to_string(n) + " nodes");
  }
  if (!labels_.empty()) {
    if (labels_.size() != static_cast<size_t>(n)) throw ValidationError("labels length != num_nodes");
    for (int32_t y : labels_) {
      if (y < -1 || y >= static_cast<int32_t>(class_names_.size())) {
        throw ValidationError("label " + std::to_string(y) + " outside the class vocabulary");
      }
    }
  }
  if (!split_.empty() && split_.size() != static_cast<size_t>(n)) {
    throw ValidationError("split length != num_nodes");
  }
  if (!node_ids_.empty() && node_ids_.size() != static_cast<size_t>(n)) {
    throw ValidationError("node id list length != num_nodes");
  }
}

bool Graph::operator==(const Graph& other) const {
  return adjacency_ == other.adjacency_ && features_.rows() == other.features_.rows() &&
         features_.cols() == other.features_.cols() && features_ == other.features_ &&
         labels_ == other.labels_ && class_names_ == other.class_names_ &&
         split_ == other.split_ && node_ids_ == other.node_ids_ && metadata_ == other.metadata_;
}

SupportGraphIndex::SupportGraphIndex(std::vector<int64_t> offsets, std::vector<NodeId> members)
    : offsets_(std::move(offsets)), members_(std::move(members)) {
  for (size_t i = 0; i + 1 < offsets_.size(); ++i) {
    if (offsets_[i + 1] <= offsets_[i]) {
      throw ValidationError("support graph of node " + std::to_string(i) + " is empty");
    }
  }
}

Graph RowNormalizeFeatures(const Graph& graph) {
  Matrix x = graph.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double s = x.row(r).sum();
    if (s != 0.0) x.row(r) /= s;
  }
  return graph.WithFeatures(std::move(x));
}

CsrMatrix NormalizedAdjacency(const Graph& graph) {
  const NodeId n = graph.num_nodes();
  const CsrMatrix& a = graph.adjacency();
  std::vector<double> inv_sqrt_degree(static_cast<size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    double d = 1.0;  // self-loop
    for (double v : a.RowValues(i)) d += v;
    inv_sqrt_degree[i] = 1.0 / std::sqrt(d);
  }
  CsrMatrix out;
  out.rows = out.cols = n;
  out.offsets.assign(static_cast<size_t>(n) + 1, 0);
  out.columns.reserve(a.nnz() + static_cast<size_t>(n));
  out.values.reserve(a.nnz() + static_cast<size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    const auto cols = a.RowColumns(i);
    const auto vals = a.RowValues(i);
    bool diagonal_done = false;
    for (size_t k = 0; k <= cols.size(); ++k) {
      if (!diagonal_done && (k == cols.size() || cols[k] > i)) {
        out.columns.push_back(i);
        out.values.push_back(inv_sqrt_degree[i] * inv_sqrt_degree[i]);
        diagonal_done = true;
      }
      if (k == cols.size()) break;
      out.columns.push_back(cols[k]);
      out.values.push_back(vals[k] * inv_sqrt_degree[i] * inv_sqrt_degree[cols[k]]);
    }
    out.offsets[i + 1] = static_cast<int64_t>(out.columns.size());
  }
  return out;
}

SupportGraphIndex BuildSupportIndex(const Graph& graph) {
  const NodeId n = graph.num_nodes();
  std::vector<int64_t> offsets(static_cast<size_t>(n) + 1, 0);
  std::vector<NodeId> members;
  members.reserve(graph.adjacency().nnz() + static_cast<size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    const auto nb = graph.Neighbors(i);
    auto split = std::lower_bound(nb.begin(), nb.end(), i);
    members.insert(members.end(), nb.begin(), split);
    members.push_back(i);
    members.insert(members.end(), split, nb.end());
    offsets[i + 1] = static_cast<int64_t>(members.size());
  }
  return SupportGraphIndex(std::move(offsets), std::move(members));
}

NodeId BreadthFirstReach(const Graph& graph, NodeId start) {
  const NodeId n = graph.num_nodes();
  if (n == 0) return 0;
  std::vector<uint8_t> seen(static_cast<size_t>(n), 0);
  std::queue<NodeId> frontier;
  frontier.push(start);
  seen[start] = 1;
  NodeId visited = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    ++visited;
    for (NodeId v : graph.Neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push(v);
      }
    }
  }
  return visited;
}

NodeId CountComponents(const Graph& graph) {
  DisjointSets sets(graph.num_nodes());
  NodeId components = graph.num_nodes();
  for (const Edge& e : graph.Edges()) {
    if (sets.Union(e.u, e.v)) --components;
  }
  return components;
}

EdgeSplit RemoveEdges(const Graph& graph, double ratio, uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw ConfigError("edge removal ratio must lie in [0, 1), got " + std::to_string(ratio));
  }
  std::vector<Edge> edges = graph.Edges();
  const size_t total = edges.size();
  const auto quota = static_cast<size_t>(std::llround(ratio * static_cast<double>(total)));

  Rng rng(seed);
  // Kruskal over a random edge order gives a random spanning forest; its
  // edges are protected, everything else is removable.
  std::vector<Edge> order = edges;
  Shuffle(std::span<Edge>(order), rng);
  DisjointSets sets(graph.num_nodes());
  std::vector<Edge> candidates;
  candidates.reserve(total);
  for (const Edge& e : order) {
    if (!sets.Union(e.u, e.v)) candidates.push_back(e);
  }
  if (quota > candidates.size()) {
    const double max_ratio = total == 0 ? 0.0 : static_cast<double>(candidates.size()) / total;
    std::ostringstream msg;
    msg << "cannot remove " << quota << " of " << total
        << " edges without disconnecting the graph; max achievable ratio is " << max_ratio;
    throw QuotaError(msg.str(), max_ratio);
  }
  Shuffle(std::span<Edge>(candidates), rng);
  std::vector<Edge> removed(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(quota));
  std::sort(removed.begin(), removed.end());

  std::vector<Edge> kept;
  kept.reserve(total - quota);
  std::set_difference(edges.begin(), edges.end(), removed.begin(), removed.end(),
                      std::back_inserter(kept));

  EdgeSplit split;
  split.damaged = graph.WithEdges(kept);
  split.removed_edges = std::move(removed);
  split.removal_ratio = ratio;
  return split;
}

Graph InducedSubgraph(const Graph& graph, std::span<const NodeId> nodes) {
  const NodeId n = graph.num_nodes();
  std::vector<NodeId> remap(static_cast<size_t>(n), -1);
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] < 0 || nodes[k] >= n) throw ValidationError("subgraph node out of range");
    if (remap[nodes[k]] != -1) throw ValidationError("subgraph node listed twice");
    remap[nodes[k]] = static_cast<NodeId>(k);
  }
  std::vector<Edge> edges;
  Matrix features(static_cast<Eigen::Index>(nodes.size()), graph.feature_dim());
  for (size_t k = 0; k < nodes.size(); ++k) {
    features.row(static_cast<Eigen::Index>(k)) = graph.features().row(nodes[k]);
    for (NodeId j : graph.Neighbors(nodes[k])) {
      if (remap[j] > static_cast<NodeId>(k)) edges.push_back({static_cast<NodeId>(k), remap[j]});
    }
  }
  Graph sub = Graph::FromEdges(static_cast<NodeId>(nodes.size()), edges, std::move(features));
  if (graph.has_labels()) {
    std::vector<int32_t> labels;
    for (NodeId i : nodes) labels.push_back(graph.labels()[i]);
    sub = sub.WithLabels(std::move(labels), graph.class_names());
  }
  if (graph.has_split()) {
    std::vector<SplitTag> split;
    for (NodeId i : nodes) split.push_back(graph.split()[i]);
    sub = sub.WithSplit(std::move(split));
  }
  std::vector<std::string> ids;
  for (NodeId i : nodes) ids.push_back(graph.NodeName(i));
  return sub.WithNodeIds(std::move(ids));
}

Graph PermuteNodes(const Graph& graph, std::span<const NodeId> permutation) {
  const NodeId n = graph.num_nodes();
  if (permutation.size() != static_cast<size_t>(n)) throw DimensionError("permutation length != num_nodes");
  // InducedSubgraph takes new->old; invert.
  std::vector<NodeId> inverse(static_cast<size_t>(n), -1);
  for (NodeId old = 0; old < n; ++old) {
    const NodeId nw = permutation[old];
    if (nw < 0 || nw >= n || inverse[nw] != -1) throw ValidationError("not a permutation");
    inverse[nw] = old;
  }
  return InducedSubgraph(graph, inverse).WithMetadata(graph.metadata());
}

}  // namespace gmi
