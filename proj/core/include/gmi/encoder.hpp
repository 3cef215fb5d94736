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

#include <filesystem>
#include <vector>

#include "gmi/binary_io.hpp"
#include "gmi/diffmath.hpp"
#include "gmi/graph.hpp"
#include "gmi/rng.hpp"

namespace gmi {

struct EncoderConfig {
  int depth = 2;
  int hidden_dim = 512;
  /// Identity shortcut every two layers, from the third layer on (the first
  /// layer changes width).
  bool residual = false;
  /// Expose every hidden layer to the objective, not just the last.
  bool dense_gmi = false;

  void Validate() const;
};

struct EncoderLayer {
  Parameter weight;  // d_in x d_out
  Parameter slope;   // 1x1 PReLU slope
};

/// GCN encoder parameters: H^{l+1} = PReLU(Â H^l W^l), no biases.
struct EncoderParams {
  std::vector<EncoderLayer> layers;
  EncoderConfig config;

  int depth() const { return static_cast<int>(layers.size()); }
  int64_t input_dim() const { return layers.empty() ? 0 : layers.front().weight.value.rows(); }
  /// Throws ValidationError on inconsistent layer widths.
  void Validate() const;
  std::vector<Parameter*> Parameters();
};

/// Uniform in [-a, a], a = sqrt(6 / (d_in + d_out)).
Matrix GlorotInit(int64_t d_in, int64_t d_out, Rng& rng);
Matrix GlorotInit(int64_t d_in, int64_t d_out, uint64_t seed);
inline double GlorotBound(int64_t d_in, int64_t d_out) {
  return std::sqrt(6.0 / static_cast<double>(d_in + d_out));
}

/// Weights Glorot-initialized, PReLU slopes 0.25.
EncoderParams InitEncoder(int64_t input_dim, const EncoderConfig& config, Rng& rng);

/// Per-graph constants reused every training step.
struct GraphOperators {
  NodeId num_nodes = 0;
  CsrMatrix norm_adj;   // D^{-1/2}(A + I)D^{-1/2}
  CsrMatrix features;   // X in sparse form
  SupportGraphIndex support;
  std::vector<Edge> edges;
  const Graph* graph = nullptr;

  static GraphOperators Build(const Graph& graph);
};

struct EncoderOutput {
  Tensor h;                      // final embeddings, N x hidden_dim
  std::vector<Tensor> per_layer; // every layer output (last == h)
  Tensor compressed;             // X W^{(0)}
};

EncoderOutput Encode(Tape& tape, const GraphOperators& ops, EncoderParams& params);

/// X W^{(0)}: no propagation, no activation.
Tensor CompressedInput(Tape& tape, const GraphOperators& ops, EncoderParams& params);

/// Forward pass without keeping a tape around.
Matrix EncodeValues(const Graph& graph, EncoderParams& params);

/// u64 rows, u64 cols, then row-major values.
void WriteMatrix(BinaryWriter& out, const Matrix& m);
Matrix ReadMatrix(BinaryReader& in);

void WriteEncoder(BinaryWriter& out, const EncoderParams& params);
/// Rejects files whose layer shapes differ from `expected` (when given).
EncoderParams ReadEncoder(BinaryReader& in, const EncoderParams* expected = nullptr);

// Standalone parameter file: magic "GMIP", u32 version, then WriteEncoder.
void SaveEncoderFile(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams LoadEncoderFile(const std::filesystem::path& path,
                              const EncoderParams* expected = nullptr);

}  // namespace gmi
