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

#include "gmi/verification.hpp"

#include <cmath>
#include <numeric>

namespace gmi {

Graph MakeToyGraph() {
  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}};
  Matrix x(6, 5);
  x << 1.0, 0.0, 0.5, 0.0, 0.2,
       0.8, 0.1, 0.0, 0.3, 0.0,
       0.9, 0.0, 0.4, 0.1, 0.6,
       0.0, 0.7, 0.0, 1.0, 0.3,
       0.1, 1.0, 0.2, 0.0, 0.9,
       0.0, 0.6, 0.0, 0.8, 0.4;
  return Graph::FromEdges(6, edges, std::move(x));
}

LossSetup MakeLossSetup(const Graph& graph, const EncoderConfig& encoder, const GmiConfig& gmi,
                        uint64_t seed) {
  const SeedStreams streams(seed);
  Rng init = streams.Stream("init");
  LossSetup setup;
  setup.encoder = InitEncoder(graph.feature_dim(), encoder, init);
  setup.discriminators = InitDiscriminators(setup.encoder, graph.feature_dim(), gmi, init);
  Rng negatives = streams.Stream("negatives");
  setup.samples = DrawStepSamples(GraphOperators::Build(graph), gmi, negatives);
  return setup;
}

double EvaluateLoss(const Graph& graph, LossSetup& setup, const GmiConfig& gmi) {
  const GraphOperators ops = GraphOperators::Build(graph);
  Tape tape;
  const EncoderOutput encoded = Encode(tape, ops, setup.encoder);
  return GmiLoss(tape, ops, encoded, setup.discriminators, gmi, setup.encoder.config.dense_gmi,
                 setup.samples)
      .loss.item();
}

GradCheckResult CheckLossGradients(const Graph& graph, const EncoderConfig& encoder,
                                   const GmiConfig& gmi, uint64_t seed,
                                   const GradCheckOptions& options) {
  LossSetup setup = MakeLossSetup(graph, encoder, gmi, seed);
  const GraphOperators ops = GraphOperators::Build(graph);
  std::vector<Parameter*> params = setup.encoder.Parameters();
  for (auto& d : setup.discriminators) params.push_back(&d.theta);
  const LossFn loss = [&](Tape& tape) {
    const EncoderOutput encoded = Encode(tape, ops, setup.encoder);
    return GmiLoss(tape, ops, encoded, setup.discriminators, gmi, setup.encoder.config.dense_gmi,
                   setup.samples)
        .loss;
  };
  return GradCheck(loss, params, options);
}

std::vector<NodeId> RandomPermutation(NodeId n, Rng& rng) {
  std::vector<NodeId> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Shuffle(std::span<NodeId>(perm), rng);
  return perm;
}

PermutationCheck CheckPermutationInvariance(const Graph& graph, const EncoderConfig& encoder,
                                            const GmiConfig& gmi, uint64_t seed,
                                            std::span<const NodeId> permutation) {
  LossSetup setup = MakeLossSetup(graph, encoder, gmi, seed);
  PermutationCheck out;
  out.original = EvaluateLoss(graph, setup, gmi);
  const Graph permuted = PermuteNodes(graph, permutation);
  setup.samples = setup.samples.Permuted(permutation);
  out.permuted = EvaluateLoss(permuted, setup, gmi);
  out.abs_diff = std::abs(out.original - out.permuted);
  return out;
}

}  // namespace gmi
