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

// Self-checks shared by `gmi verify`, the acceptance suite and the tests.

#pragma once

#include <span>
#include <vector>

#include "gmi/diffmath.hpp"
#include "gmi/encoder.hpp"
#include "gmi/graph.hpp"
#include "gmi/objective.hpp"

namespace gmi {

/// Two triangles {0,1,2}, {3,4,5} joined by the edge 2-3, with 5 fixed
/// non-negative features per node.
Graph MakeToyGraph();

/// Parameters, discriminators and one draw of step samples, all from `seed`.
struct LossSetup {
  EncoderParams encoder;
  std::vector<Discriminator> discriminators;
  StepSamples samples;
};

LossSetup MakeLossSetup(const Graph& graph, const EncoderConfig& encoder, const GmiConfig& gmi,
                        uint64_t seed);

/// Loss value for fixed parameters and samples.
double EvaluateLoss(const Graph& graph, LossSetup& setup, const GmiConfig& gmi);

/// Finite-difference check of the full loss over every encoder and
/// discriminator parameter, samples held fixed.
GradCheckResult CheckLossGradients(const Graph& graph, const EncoderConfig& encoder,
                                   const GmiConfig& gmi, uint64_t seed,
                                   const GradCheckOptions& options = {});

std::vector<NodeId> RandomPermutation(NodeId n, Rng& rng);

struct PermutationCheck {
  double original = 0.0;
  double permuted = 0.0;
  double abs_diff = 0.0;
};

/// Loss on the graph vs. on its relabeling new = permutation[old] with the
/// same parameters and relabeled samples.
PermutationCheck CheckPermutationInvariance(const Graph& graph, const EncoderConfig& encoder,
                                            const GmiConfig& gmi, uint64_t seed,
                                            std::span<const NodeId> permutation);

}  // namespace gmi
