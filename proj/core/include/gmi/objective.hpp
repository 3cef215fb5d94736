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

// The GMI objective: weighted JSD local feature-MI terms over every support
// graph pair, plus an edge/non-edge cross-entropy topology term.

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "gmi/diffmath.hpp"
#include "gmi/encoder.hpp"
#include "gmi/rng.hpp"

namespace gmi {

enum class WeightMode { kMean, kAdaptive };

std::string_view ToString(WeightMode mode);
/// Accepts "mean" or "adaptive"; throws ConfigError otherwise.
WeightMode ParseWeightMode(std::string_view text);

struct GmiConfig {
  WeightMode weight_mode = WeightMode::kMean;
  int negatives = 5;
  double alpha = 1.0;  // FMI trade-off
  double beta = 1.0;   // topology trade-off
  /// Score h_i against x_j W^{(0)} instead of the raw feature row.
  bool compressed_input = true;
  int topology_negatives_per_edge = 1;
  /// Dense-GMI only: one discriminator for every layer.
  bool shared_discriminator = false;

  void Validate() const;
};

/// Bilinear scorer h^T Θ x; theta is D' x D_x.
struct Discriminator {
  Parameter theta;
};

std::vector<Discriminator> InitDiscriminators(const EncoderParams& encoder, int64_t feature_dim,
                                              const GmiConfig& config, Rng& rng);

/// Everything random about one training step.
struct StepSamples {
  /// Every (i, j) with j in support(i), node-major.
  std::vector<NodePair> pairs;
  /// 1 / i_n for each pair.
  std::vector<double> mean_weights;
  /// pairs.size() * k feature-row indices; row p*k + c is negative c of pair p.
  std::vector<NodeId> negatives;
  int k = 0;
  /// Undirected training edges, each once.
  std::vector<NodePair> topo_pos;
  /// Sampled non-adjacent pairs.
  std::vector<NodePair> topo_neg;
  NodeId num_nodes = 0;

  /// Relabels every node index through new = permutation[old].
  StepSamples Permuted(std::span<const NodeId> permutation) const;
};

/// Negatives: k uniform rows per pair. Topology: for each edge (i, j),
/// `topology_negatives_per_edge` nodes m != i not adjacent to i, as (i, m).
StepSamples DrawStepSamples(const GraphOperators& ops, const GmiConfig& config, Rng& rng);

// Scalar reference forms.
double BilinearLogit(const Eigen::Ref<const Eigen::RowVectorXd>& h, const Matrix& theta,
                     const Eigen::Ref<const Eigen::RowVectorXd>& x);
/// -sp(-pos) - mean_k sp(neg_k).
double JsdLocalMi(double pos_logit, std::span<const double> neg_logits);

/// Per-pair weights as a column vector: constant 1/i_n, or sigmoid(h_i . h_j).
Tensor Weights(const Tensor& h, const StepSamples& samples, WeightMode mode);

/// (1/N) sum_i sum_{j in support(i)} w_ij I_jsd(h_i; x_j). `x_eff` is
/// N x D_x; pass an invalid Tensor to score the raw sparse features.
Tensor FmiTerm(const Tensor& h, const Tensor& x_eff, const CsrMatrix* raw_features,
               const Tensor& theta, const StepSamples& samples, WeightMode mode);

/// Mean of log sigmoid(z) over edges and log sigmoid(-z) over sampled
/// non-edges, z = h_i . h_j. Always <= 0.
Tensor TopologyTerm(const Tensor& h, const StepSamples& samples);

struct GmiTerms {
  Tensor loss;
  Tensor fmi;
  Tensor topology;
};

/// loss = -(alpha * fmi + beta * topology). In dense-GMI mode fmi is the mean
/// over every layer output.
GmiTerms GmiLoss(Tape& tape, const GraphOperators& ops, const EncoderOutput& encoded,
                 std::vector<Discriminator>& discriminators, const GmiConfig& config,
                 bool dense_gmi, const StepSamples& samples);

}  // namespace gmi
