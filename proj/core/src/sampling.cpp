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

#include "gmi/sampling.hpp"

#include <algorithm>
#include <string>

#include "gmi/error.hpp"

namespace gmi {
namespace {

/// Up to k distinct members of `pool`, by a partial Fisher-Yates shuffle.
std::vector<NodeId> Choose(std::span<const NodeId> pool, int k, Rng& rng) {
  std::vector<NodeId> items(pool.begin(), pool.end());
  const size_t take = std::min(items.size(), static_cast<size_t>(k));
  for (size_t i = 0; i < take; ++i) {
    const size_t j = i + UniformIndex(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(take);
  return items;
}

}  // namespace

SampledSubgraph SubsampleNeighborhood(const Graph& graph, std::span<const NodeId> roots,
                                      int fanout1, int fanout2, Rng& rng) {
  if (roots.empty()) throw ValidationError("subsample: empty root set");
  if (fanout1 < 1 || fanout2 < 1) throw ConfigError("subsample: fanouts must be >= 1");
  const NodeId n = graph.num_nodes();
  std::vector<bool> selected(static_cast<size_t>(n), false);
  for (NodeId r : roots) {
    if (r < 0 || r >= n) throw ValidationError("subsample: root " + std::to_string(r) + " out of range");
    selected[static_cast<size_t>(r)] = true;
  }
  for (NodeId r : roots) {
    for (NodeId a : Choose(graph.Neighbors(r), fanout1, rng)) {
      selected[static_cast<size_t>(a)] = true;
      for (NodeId b : Choose(graph.Neighbors(a), fanout2, rng)) selected[static_cast<size_t>(b)] = true;
    }
  }
  SampledSubgraph out;
  out.local.assign(static_cast<size_t>(n), -1);
  for (NodeId v = 0; v < n; ++v) {
    if (!selected[static_cast<size_t>(v)]) continue;
    out.local[static_cast<size_t>(v)] = static_cast<NodeId>(out.original.size());
    out.original.push_back(v);
  }
  out.graph = InducedSubgraph(graph, out.original);
  return out;
}

SampledSubgraph SubsampleNeighborhood(const Graph& graph, std::span<const NodeId> roots,
                                      int fanout1, int fanout2, uint64_t seed) {
  Rng rng(seed);
  return SubsampleNeighborhood(graph, roots, fanout1, fanout2, rng);
}

}  // namespace gmi
