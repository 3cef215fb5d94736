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

#include <span>
#include <vector>

#include "gmi/graph.hpp"
#include "gmi/rng.hpp"

namespace gmi {

struct SampledSubgraph {
  Graph graph;
  /// original[new] = old index.
  std::vector<NodeId> original;
  /// local[old] = new index, or -1 when the node was not selected.
  std::vector<NodeId> local;
};

/// Uniform neighbor sampling without replacement: up to `fanout1` neighbors
/// of each root, then up to `fanout2` neighbors of each of those. Returns the
/// induced subgraph over roots and sampled nodes, in ascending original order.
SampledSubgraph SubsampleNeighborhood(const Graph& graph, std::span<const NodeId> roots,
                                      int fanout1, int fanout2, Rng& rng);
SampledSubgraph SubsampleNeighborhood(const Graph& graph, std::span<const NodeId> roots,
                                      int fanout1, int fanout2, uint64_t seed);

}  // namespace gmi
