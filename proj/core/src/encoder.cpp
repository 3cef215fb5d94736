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

#include "gmi/encoder.hpp"

#include <cmath>
#include <string>

#include "gmi/error.hpp"

namespace gmi {
namespace {

constexpr std::string_view kEncoderMagic = "GMIP";
constexpr uint32_t kEncoderVersion = 1;
constexpr double kInitialSlope = 0.25;

}  // namespace

void WriteMatrix(BinaryWriter& out, const Matrix& m) {
  out.WriteU64(static_cast<uint64_t>(m.rows()));
  out.WriteU64(static_cast<uint64_t>(m.cols()));
  out.WriteF64Array({m.data(), static_cast<size_t>(m.size())});
}

Matrix ReadMatrix(BinaryReader& in) {
  const uint64_t rows = in.ReadU64();
  const uint64_t cols = in.ReadU64();
  const std::vector<double> raw = in.ReadF64Array(rows * cols);
  return Eigen::Map<const Matrix>(raw.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

void EncoderConfig::Validate() const {
  if (depth < 1) throw ConfigError("encoder depth must be >= 1, got " + std::to_string(depth));
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
}

void EncoderParams::Validate() const {
  config.Validate();
  if (layers.size() != static_cast<size_t>(config.depth)) {
    throw ValidationError("encoder has " + std::to_string(layers.size()) + " layers, config says " +
                          std::to_string(config.depth));
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    const Matrix& w = layers[l].weight.value;
    if (w.cols() != config.hidden_dim) {
      throw ValidationError("layer " + std::to_string(l) + " output width " +
                            std::to_string(w.cols()) + " != hidden_dim");
    }
    if (l > 0 && w.rows() != layers[l - 1].weight.value.cols()) {
      throw ValidationError("layer " + std::to_string(l) + " input width does not match layer " +
                            std::to_string(l - 1));
    }
    if (layers[l].slope.value.size() != 1) throw ValidationError("PReLU slope must be 1x1");
  }
}

std::vector<Parameter*> EncoderParams::Parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.slope);
  }
  return out;
}

Matrix GlorotInit(int64_t d_in, int64_t d_out, Rng& rng) {
  if (d_in < 1 || d_out < 1) throw ConfigError("GlorotInit: dimensions must be >= 1");
  const double a = GlorotBound(d_in, d_out);
  Matrix w(d_in, d_out);
  for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = UniformReal(rng, -a, a);
  return w;
}

Matrix GlorotInit(int64_t d_in, int64_t d_out, uint64_t seed) {
  Rng rng(seed);
  return GlorotInit(d_in, d_out, rng);
}

EncoderParams InitEncoder(int64_t input_dim, const EncoderConfig& config, Rng& rng) {
  config.Validate();
  EncoderParams params;
  params.config = config;
  int64_t d_in = input_dim;
  for (int l = 0; l < config.depth; ++l) {
    EncoderLayer layer;
    layer.weight = Parameter("W" + std::to_string(l), GlorotInit(d_in, config.hidden_dim, rng));
    layer.slope = Parameter("prelu" + std::to_string(l), Matrix::Constant(1, 1, kInitialSlope));
    params.layers.push_back(std::move(layer));
    d_in = config.hidden_dim;
  }
  return params;
}

GraphOperators GraphOperators::Build(const Graph& graph) {
  GraphOperators ops;
  ops.num_nodes = graph.num_nodes();
  ops.norm_adj = NormalizedAdjacency(graph);
  ops.features = CsrMatrix::FromDense(graph.features());
  ops.support = BuildSupportIndex(graph);
  ops.edges = graph.Edges();
  ops.graph = &graph;
  return ops;
}

Tensor CompressedInput(Tape& tape, const GraphOperators& ops, EncoderParams& params) {
  if (params.layers.empty()) throw ValidationError("encoder has no layers");
  if (ops.features.cols != params.input_dim()) {
    throw DimensionError("features have " + std::to_string(ops.features.cols) +
                         " columns, encoder expects " + std::to_string(params.input_dim()));
  }
  return SpMM(ops.features, tape.Leaf(params.layers.front().weight));
}

EncoderOutput Encode(Tape& tape, const GraphOperators& ops, EncoderParams& params) {
  params.Validate();
  EncoderOutput out;
  out.compressed = CompressedInput(tape, ops, params);
  Tensor h = PRelu(SpMM(ops.norm_adj, out.compressed), tape.Leaf(params.layers[0].slope));
  out.per_layer.push_back(h);
  for (int l = 1; l < params.depth(); ++l) {
    EncoderLayer& layer = params.layers[static_cast<size_t>(l)];
    const Tensor input = h;
    h = PRelu(SpMM(ops.norm_adj, MatMul(input, tape.Leaf(layer.weight))), tape.Leaf(layer.slope));
    // Shortcut over the block (l-1, l): add the input of layer l-1.
    if (params.config.residual && l >= 2 && l % 2 == 0) {
      h = Add(h, out.per_layer[static_cast<size_t>(l) - 2]);
    }
    out.per_layer.push_back(h);
  }
  out.h = h;
  return out;
}

Matrix EncodeValues(const Graph& graph, EncoderParams& params) {
  const GraphOperators ops = GraphOperators::Build(graph);
  Tape tape;
  return Encode(tape, ops, params).h.value();
}

void WriteEncoder(BinaryWriter& out, const EncoderParams& params) {
  out.WriteU32(static_cast<uint32_t>(params.config.depth));
  out.WriteU32(static_cast<uint32_t>(params.config.hidden_dim));
  out.WriteU8(params.config.residual ? 1 : 0);
  out.WriteU8(params.config.dense_gmi ? 1 : 0);
  for (const auto& layer : params.layers) {
    WriteMatrix(out, layer.weight.value);
    out.WriteF64(layer.slope.value(0, 0));
  }
}

EncoderParams ReadEncoder(BinaryReader& in, const EncoderParams* expected) {
  EncoderParams params;
  params.config.depth = static_cast<int>(in.ReadU32());
  params.config.hidden_dim = static_cast<int>(in.ReadU32());
  params.config.residual = in.ReadU8() != 0;
  params.config.dense_gmi = in.ReadU8() != 0;
  if (expected != nullptr && params.config.depth != expected->depth()) {
    throw ValidationError("checkpoint has " + std::to_string(params.config.depth) +
                          " layers, expected " + std::to_string(expected->depth()));
  }
  for (int l = 0; l < params.config.depth; ++l) {
    EncoderLayer layer;
    layer.weight = Parameter("W" + std::to_string(l), ReadMatrix(in));
    layer.slope = Parameter("prelu" + std::to_string(l), Matrix::Constant(1, 1, in.ReadF64()));
    if (expected != nullptr) {
      const Matrix& want = expected->layers[static_cast<size_t>(l)].weight.value;
      if (want.rows() != layer.weight.value.rows() || want.cols() != layer.weight.value.cols()) {
        throw ValidationError("checkpoint layer " + std::to_string(l) + " is " +
                              std::to_string(layer.weight.value.rows()) + "x" +
                              std::to_string(layer.weight.value.cols()) + ", expected " +
                              std::to_string(want.rows()) + "x" + std::to_string(want.cols()));
      }
    }
    params.layers.push_back(std::move(layer));
  }
  params.Validate();
  return params;
}

void SaveEncoderFile(const std::filesystem::path& path, const EncoderParams& params) {
  BinaryWriter out(path);
  out.WriteHeader(kEncoderMagic, kEncoderVersion);
  WriteEncoder(out, params);
  out.Close();
}

EncoderParams LoadEncoderFile(const std::filesystem::path& path, const EncoderParams* expected) {
  BinaryReader in(path);
  const uint32_t version = in.ReadHeader(kEncoderMagic);
  if (version != kEncoderVersion) {
    throw ParseError(path.string() + ": unsupported encoder file version " + std::to_string(version));
  }
  return ReadEncoder(in, expected);
}

}  // namespace gmi
