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

#include <benchmark/benchmark.h>

#include "gmi/diffmath.hpp"
#include "gmi/encoder.hpp"
#include "gmi/objective.hpp"

namespace {

// Random graph with `n` nodes and average degree about 4, and sparse binary
// features like a bag-of-words dataset.
gmi::Graph RandomGraph(gmi::NodeId n, int64_t feature_dim, uint64_t seed) {
  gmi::Rng rng(seed);
  std::vector<gmi::Edge> edges;
  for (gmi::NodeId i = 0; i < 2 * n; ++i) {
    const auto a = static_cast<gmi::NodeId>(gmi::UniformIndex(rng, n));
    const auto b = static_cast<gmi::NodeId>(gmi::UniformIndex(rng, n));
    if (a != b) edges.push_back(gmi::MakeEdge(a, b));
  }
  gmi::Matrix x = gmi::Matrix::Zero(n, feature_dim);
  for (gmi::NodeId i = 0; i < n; ++i) {
    for (int k = 0; k < 18; ++k) x(i, gmi::UniformIndex(rng, feature_dim)) = 1.0;
  }
  return gmi::Graph::FromEdges(n, edges, x);
}

gmi::Matrix RandomDense(Eigen::Index r, Eigen::Index c, uint64_t seed) {
  gmi::Rng rng(seed);
  gmi::Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = gmi::UniformReal(rng, -1.0, 1.0);
  return m;
}

void BM_SpMM(benchmark::State& state) {
  const auto n = static_cast<gmi::NodeId>(state.range(0));
  const gmi::Graph g = RandomGraph(n, 64, 1);
  const gmi::CsrMatrix a = gmi::NormalizedAdjacency(g);
  const gmi::Matrix d = RandomDense(n, 512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(gmi::SparseDenseProduct(a, d));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(a.nnz()) * 512);
}
BENCHMARK(BM_SpMM)->Arg(1000)->Arg(2708)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_MatMul(benchmark::State& state) {
  const auto n = state.range(0);
  gmi::Parameter a("a", RandomDense(n, 512, 3));
  gmi::Parameter b("b", RandomDense(512, 512, 4));
  for (auto _ : state) {
    gmi::Tape tape;
    benchmark::DoNotOptimize(gmi::MatMul(tape.Leaf(a), tape.Leaf(b)).value().data());
  }
  state.SetItemsProcessed(state.iterations() * n * 512 * 512);
}
BENCHMARK(BM_MatMul)->Arg(256)->Arg(2708)->Unit(benchmark::kMillisecond);

struct LossFixture {
  gmi::Graph graph;
  gmi::GraphOperators ops;
  gmi::EncoderParams encoder;
  std::vector<gmi::Discriminator> discriminators;
  gmi::GmiConfig config;
  gmi::StepSamples samples;

  LossFixture(gmi::NodeId n, int hidden, gmi::WeightMode mode)
      : graph(RandomGraph(n, 1433, 5)), ops(gmi::GraphOperators::Build(graph)) {
    gmi::Rng rng(6);
    gmi::EncoderConfig enc;
    enc.hidden_dim = hidden;
    encoder = gmi::InitEncoder(graph.feature_dim(), enc, rng);
    config.weight_mode = mode;
    discriminators = gmi::InitDiscriminators(encoder, graph.feature_dim(), config, rng);
    samples = gmi::DrawStepSamples(ops, config, rng);
  }

  double Run(bool backward) {
    gmi::Tape tape;
    gmi::EncoderOutput out = gmi::Encode(tape, ops, encoder);
    gmi::GmiTerms t = gmi::GmiLoss(tape, ops, out, discriminators, config, false, samples);
    const double loss = t.loss.item();
    if (backward) tape.Backward(t.loss);
    return loss;
  }
};

void BM_LossForward(benchmark::State& state) {
  LossFixture f(static_cast<gmi::NodeId>(state.range(0)), static_cast<int>(state.range(1)),
                gmi::WeightMode::kMean);
  for (auto _ : state) benchmark::DoNotOptimize(f.Run(false));
}
BENCHMARK(BM_LossForward)->Args({2708, 128})->Args({2708, 512})->Unit(benchmark::kMillisecond);

void BM_LossForwardBackward(benchmark::State& state) {
  LossFixture f(static_cast<gmi::NodeId>(state.range(0)), static_cast<int>(state.range(1)),
                state.range(2) == 0 ? gmi::WeightMode::kMean : gmi::WeightMode::kAdaptive);
  for (auto _ : state) benchmark::DoNotOptimize(f.Run(true));
}
BENCHMARK(BM_LossForwardBackward)
    ->Args({2708, 128, 0})
    ->Args({2708, 512, 0})
    ->Args({2708, 512, 1})
    ->Unit(benchmark::kMillisecond);

void BM_DrawStepSamples(benchmark::State& state) {
  const gmi::Graph g = RandomGraph(static_cast<gmi::NodeId>(state.range(0)), 16, 7);
  const gmi::GraphOperators ops = gmi::GraphOperators::Build(g);
  gmi::Rng rng(8);
  for (auto _ : state) benchmark::DoNotOptimize(gmi::DrawStepSamples(ops, gmi::GmiConfig{}, rng));
}
BENCHMARK(BM_DrawStepSamples)->Arg(2708)->Arg(20000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
