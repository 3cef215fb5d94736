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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmi/graph.hpp"
#include "gmi/rng.hpp"

namespace gmi {

/// Zero mean, unit (population) variance per column; constant columns -> 0.
Matrix Standardize(const Matrix& x);

struct LogisticConfig {
  double l2 = 0.01;
  int iterations = 300;
  double learning_rate = 0.1;
};

/// Multinomial logistic regression: x * weights + bias -> softmax.
struct LogisticModel {
  Matrix weights;             // D x C
  Eigen::RowVectorXd bias;    // 1 x C

  Matrix Scores(const Matrix& x) const;
  std::vector<int32_t> Predict(const Matrix& x) const;
};

/// Full-batch gradient descent on mean cross-entropy + (l2 / 2) ||W||^2.
/// Weights start uniform in [-0.01, 0.01] from `rng`.
LogisticModel FitLogistic(const Matrix& x, std::span<const int32_t> y, int32_t num_classes,
                          const LogisticConfig& config, Rng& rng);

double Accuracy(std::span<const int32_t> predictions, std::span<const int32_t> labels);
/// Single-label micro-F1 over one-hot decisions (equals accuracy).
double MicroF1(std::span<const int32_t> predictions, std::span<const int32_t> labels);
/// Multilabel micro-F1: 2TP / (2TP + FP + FN) over all (node, label) cells;
/// a cell is positive when its value is > 0.5.
double MicroF1(const Matrix& predictions, const Matrix& truth);

/// Probability that a random positive outscores a random negative, ties
/// counted 1/2, via average ranks.
double Auc(std::span<const double> positive, std::span<const double> negative);

struct EvalRun {
  int run = 0;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;
};

struct EvalReport {
  std::string task;  // "classification" or "linkpred"
  std::vector<EvalRun> runs;
  std::vector<std::pair<std::string, std::string>> config;
  double seconds = 0.0;

  std::vector<std::string> MetricNames() const;
  std::vector<double> Values(const std::string& metric) const;
  double Mean(const std::string& metric) const;
  /// Population standard deviation; 0 for a single run.
  double Std(const std::string& metric) const;
  void Echo(std::string key, std::string value) { config.emplace_back(std::move(key), std::move(value)); }

  /// Flat `key = value` lines.
  std::string ToText() const;
};

/// Trains `runs` classifiers with seeds derived from `seed` on the train rows
/// and reports accuracy and micro-F1 on the test rows.
EvalReport LogisticEval(const Matrix& embeddings, std::span<const int32_t> labels,
                        int32_t num_classes, std::span<const NodeId> train,
                        std::span<const NodeId> test, int runs, uint64_t seed,
                        const LogisticConfig& config = {});

/// Regularization grid tried by SelectL2.
inline constexpr double kL2Grid[] = {0.001, 0.01, 0.1, 1.0};

/// Fits one classifier per grid value on `train` and returns the value with
/// the best accuracy on `val`; ties keep the earlier value.
double SelectL2(const Matrix& embeddings, std::span<const int32_t> labels, int32_t num_classes,
                std::span<const NodeId> train, std::span<const NodeId> val, uint64_t seed,
                std::span<const double> grid = kL2Grid, LogisticConfig config = {});

/// Draws `count` distinct node pairs that are not edges of `original`.
std::vector<Edge> SampleNonEdges(const Graph& original, size_t count, Rng& rng);

/// Link-prediction AUC of removed edges against as many sampled non-edges
/// of the original graph, one resampling per run. Pairs are ranked by
/// h_i . h_j (sigmoid is monotone, so the AUC is that of sigmoid scores).
EvalReport LinkAuc(const Matrix& h, std::span<const Edge> removed, const Graph& original,
                   uint64_t seed, int runs);

/// `<id>\t<v_1> <v_2> ... <v_D>` per node.
void ExportEmbeddingsText(const std::filesystem::path& path, const Graph& graph, const Matrix& h);
/// Magic "GMIE", u32 version, rows, cols, values, then node ids.
void ExportEmbeddingsBinary(const std::filesystem::path& path, const Graph& graph, const Matrix& h);
Matrix LoadEmbeddingsBinary(const std::filesystem::path& path,
                            std::vector<std::string>* ids = nullptr);
Matrix LoadEmbeddingsText(const std::filesystem::path& path,
                          std::vector<std::string>* ids = nullptr);

}  // namespace gmi
