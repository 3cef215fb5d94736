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

#include "gmi/objective.hpp"

#include <algorithm>
#include <string>

#include "gmi/error.hpp"

namespace gmi {

std::string_view ToString(WeightMode mode) {
  return mode == WeightMode::kMean ? "mean" : "adaptive";
}

WeightMode ParseWeightMode(std::string_view text) {
  if (text == "mean") return WeightMode::kMean;
  if (text == "adaptive") return WeightMode::kAdaptive;
  throw ConfigError("weight mode must be 'mean' or 'adaptive', got '" + std::string(text) + "'");
}

void GmiConfig::Validate() const {
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  if (topology_negatives_per_edge < 0) throw ConfigError("topology_negatives_per_edge must be >= 0");
}

std::vector<Discriminator> InitDiscriminators(const EncoderParams& encoder, int64_t feature_dim,
                                              const GmiConfig& config, Rng& rng) {
  const int64_t d_h = encoder.config.hidden_dim;
  const int64_t d_x = config.compressed_input ? d_h : feature_dim;
  const int count = encoder.config.dense_gmi && !config.shared_discriminator ? encoder.depth() : 1;
  std::vector<Discriminator> out;
  for (int l = 0; l < count; ++l) {
    out.push_back({Parameter("theta" + std::to_string(l), GlorotInit(d_h, d_x, rng))});
  }
  return out;
}

StepSamples StepSamples::Permuted(std::span<const NodeId> permutation) const {
  if (permutation.size() != static_cast<size_t>(num_nodes)) {
    throw DimensionError("permutation has " + std::to_string(permutation.size()) +
                         " entries for " + std::to_string(num_nodes) + " nodes");
  }
  auto map_pairs = [&](const std::vector<NodePair>& in) {
    std::vector<NodePair> out;
    out.reserve(in.size());
    for (auto [a, b] : in) out.emplace_back(permutation[a], permutation[b]);
    return out;
  };
  StepSamples out = *this;
  out.pairs = map_pairs(pairs);
  out.topo_pos = map_pairs(topo_pos);
  out.topo_neg = map_pairs(topo_neg);
  for (NodeId& v : out.negatives) v = permutation[v];
  return out;
}

StepSamples DrawStepSamples(const GraphOperators& ops, const GmiConfig& config, Rng& rng) {
  config.Validate();
  const NodeId n = ops.num_nodes;
  if (n < 1) throw ValidationError("graph has no nodes");
  StepSamples s;
  s.num_nodes = n;
  s.k = config.negatives;
  s.pairs.reserve(ops.support.total_pairs());
  for (NodeId i = 0; i < n; ++i) {
    const double w = 1.0 / static_cast<double>(ops.support.Size(i));
    for (NodeId j : ops.support.Members(i)) {
      s.pairs.emplace_back(i, j);
      s.mean_weights.push_back(w);
    }
  }
  s.negatives.resize(s.pairs.size() * static_cast<size_t>(s.k));
  for (NodeId& v : s.negatives) v = static_cast<NodeId>(UniformIndex(rng, static_cast<uint64_t>(n)));

  s.topo_pos.reserve(ops.edges.size());
  for (const Edge& e : ops.edges) s.topo_pos.emplace_back(e.u, e.v);
  for (const Edge& e : ops.edges) {
    const auto blocked = ops.support.Members(e.u);  // neighbors of u plus u
    if (static_cast<NodeId>(blocked.size()) >= n) continue;
    for (int c = 0; c < config.topology_negatives_per_edge; ++c) {
      NodeId m = 0;
      do {
        m = static_cast<NodeId>(UniformIndex(rng, static_cast<uint64_t>(n)));
      } while (std::binary_search(blocked.begin(), blocked.end(), m));
      s.topo_neg.emplace_back(e.u, m);
    }
  }
  return s;
}

double BilinearLogit(const Eigen::Ref<const Eigen::RowVectorXd>& h, const Matrix& theta,
                     const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (h.size() != theta.rows() || x.size() != theta.cols()) {
    throw DimensionError("bilinear logit: h has " + std::to_string(h.size()) + ", x has " +
                         std::to_string(x.size()) + ", theta is " + std::to_string(theta.rows()) +
                         "x" + std::to_string(theta.cols()));
  }
  return h.dot(theta * x.transpose());
}

double JsdLocalMi(double pos_logit, std::span<const double> neg_logits) {
  if (neg_logits.empty()) throw DomainError("jsd_local_mi needs at least one negative");
  double neg = 0.0;
  for (double z : neg_logits) neg += StableSoftplus(z);
  return -StableSoftplus(-pos_logit) - neg / static_cast<double>(neg_logits.size());
}

Tensor Weights(const Tensor& h, const StepSamples& samples, WeightMode mode) {
  if (h.rows() != samples.num_nodes) {
    throw DimensionError("weights: H has " + std::to_string(h.rows()) + " rows for " +
                         std::to_string(samples.num_nodes) + " nodes");
  }
  if (mode == WeightMode::kAdaptive) return Sigmoid(PairDot(h, h, samples.pairs));
  Matrix w = Eigen::Map<const Matrix>(samples.mean_weights.data(),
                                      static_cast<Eigen::Index>(samples.mean_weights.size()), 1);
  return h.tape()->Constant(std::move(w));
}

Tensor FmiTerm(const Tensor& h, const Tensor& x_eff, const CsrMatrix* raw_features,
               const Tensor& theta, const StepSamples& samples, WeightMode mode) {
  // q_j = Θ x_j for every node, so each logit is one row dot product.
  Tensor q;
  if (x_eff.valid()) {
    q = MatMul(x_eff, Transpose(theta));
  } else {
    if (raw_features == nullptr) throw ValidationError("fmi_term: no feature input given");
    q = SpMM(*raw_features, Transpose(theta));
  }
  const auto num_pairs = static_cast<Eigen::Index>(samples.pairs.size());
  std::vector<NodePair> neg_pairs;
  neg_pairs.reserve(samples.negatives.size());
  for (Eigen::Index p = 0; p < num_pairs; ++p) {
    for (int c = 0; c < samples.k; ++c) {
      neg_pairs.emplace_back(samples.pairs[p].first, samples.negatives[p * samples.k + c]);
    }
  }
  const Tensor pos = PairDot(h, q, samples.pairs);
  const Tensor neg = Reshape(PairDot(h, q, neg_pairs), num_pairs, samples.k);
  const Tensor local = Neg(Softplus(Neg(pos))) - RowMean(Softplus(neg));
  const Tensor weighted = Mul(Weights(h, samples, mode), local);
  return Scale(SumAll(weighted), 1.0 / static_cast<double>(samples.num_nodes));
}

Tensor TopologyTerm(const Tensor& h, const StepSamples& samples) {
  if (samples.topo_pos.empty()) throw DomainError("topology term needs at least one edge");
  const double count = static_cast<double>(samples.topo_pos.size() + samples.topo_neg.size());
  // log sigmoid(z) = -sp(-z), log(1 - sigmoid(z)) = -sp(z)
  Tensor total = SumAll(Softplus(Neg(PairDot(h, h, samples.topo_pos))));
  if (!samples.topo_neg.empty()) total = total + SumAll(Softplus(PairDot(h, h, samples.topo_neg)));
  return Scale(total, -1.0 / count);
}

GmiTerms GmiLoss(Tape& tape, const GraphOperators& ops, const EncoderOutput& encoded,
                 std::vector<Discriminator>& discriminators, const GmiConfig& config,
                 bool dense_gmi, const StepSamples& samples) {
  config.Validate();
  const std::vector<Tensor> layers =
      dense_gmi ? encoded.per_layer : std::vector<Tensor>{encoded.h};
  if (discriminators.empty()) throw ValidationError("no discriminator given");
  if (discriminators.size() != 1 && discriminators.size() != layers.size()) {
    throw ValidationError(std::to_string(discriminators.size()) + " discriminators for " +
                          std::to_string(layers.size()) + " scored layers");
  }
  const Tensor x_eff = config.compressed_input ? encoded.compressed : Tensor();

  GmiTerms terms;
  std::vector<Tensor> thetas;
  for (auto& d : discriminators) thetas.push_back(tape.Leaf(d.theta));
  try {
    for (size_t l = 0; l < layers.size(); ++l) {
      const Tensor& theta = thetas.size() == 1 ? thetas[0] : thetas[l];
      const Tensor f = FmiTerm(layers[l], x_eff, &ops.features, theta, samples, config.weight_mode);
      terms.fmi = l == 0 ? f : terms.fmi + f;
    }
    if (layers.size() > 1) terms.fmi = Scale(terms.fmi, 1.0 / static_cast<double>(layers.size()));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("fmi term: ") + e.what());
  }
  try {
    if (samples.topo_pos.empty() && config.beta == 0.0) {
      terms.topology = tape.Constant(Matrix::Zero(1, 1));
    } else {
      terms.topology = TopologyTerm(encoded.h, samples);
    }
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("topology term: ") + e.what());
  }
  terms.loss = Neg(Scale(terms.fmi, config.alpha) + Scale(terms.topology, config.beta));
  return terms;
}

}  // namespace gmi
