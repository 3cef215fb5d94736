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

#include "gmi/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "gmi/binary_io.hpp"
#include "gmi/error.hpp"

namespace gmi {
namespace {

constexpr std::string_view kEmbeddingMagic = "GMIE";
constexpr uint32_t kEmbeddingVersion = 1;

std::string FormatDouble(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix Rows(const Matrix& x, std::span<const NodeId> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(rows[k]);
  return out;
}

}  // namespace

Matrix Standardize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  if (x.rows() == 0) return out;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).sum() / n;
    const double var = (x.col(c).array() - mean).square().sum() / n;
    if (var > 0.0) {
      out.col(c) = (x.col(c).array() - mean) / std::sqrt(var);
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

Matrix LogisticModel::Scores(const Matrix& x) const {
  if (x.cols() != weights.rows()) {
    throw DimensionError("classifier expects " + std::to_string(weights.rows()) +
                         " features, got " + std::to_string(x.cols()));
  }
  Matrix s = x * weights;
  s.rowwise() += bias;
  return s;
}

std::vector<int32_t> LogisticModel::Predict(const Matrix& x) const {
  const Matrix s = Scores(x);
  std::vector<int32_t> out(static_cast<size_t>(s.rows()));
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    Eigen::Index best = 0;
    s.row(r).maxCoeff(&best);
    out[static_cast<size_t>(r)] = static_cast<int32_t>(best);
  }
  return out;
}

LogisticModel FitLogistic(const Matrix& x, std::span<const int32_t> y, int32_t num_classes,
                          const LogisticConfig& config, Rng& rng) {
  if (static_cast<size_t>(x.rows()) != y.size()) {
    throw DimensionError("classifier: " + std::to_string(x.rows()) + " rows, " +
                         std::to_string(y.size()) + " labels");
  }
  if (x.rows() == 0) throw ValidationError("classifier: no training rows");
  if (num_classes < 1) throw ValidationError("classifier: no classes");
  LogisticModel model;
  model.weights.resize(x.cols(), num_classes);
  for (Eigen::Index k = 0; k < model.weights.size(); ++k) {
    model.weights.data()[k] = UniformReal(rng, -0.01, 0.01);
  }
  model.bias = Eigen::RowVectorXd::Zero(num_classes);

  Matrix target = Matrix::Zero(x.rows(), num_classes);
  for (size_t r = 0; r < y.size(); ++r) {
    if (y[r] < 0 || y[r] >= num_classes) throw ValidationError("classifier: label out of range");
    target(static_cast<Eigen::Index>(r), y[r]) = 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  const Matrix xt = x.transpose();
  for (int it = 0; it < config.iterations; ++it) {
    Matrix p = model.Scores(x);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      p.row(r).array() -= p.row(r).maxCoeff();
      p.row(r) = p.row(r).array().exp();
      p.row(r) /= p.row(r).sum();
    }
    const Matrix g = (p - target) * inv_n;
    model.weights -= config.learning_rate * (xt * g + config.l2 * model.weights);
    model.bias -= config.learning_rate * g.colwise().sum();
  }
  return model;
}

double Accuracy(std::span<const int32_t> predictions, std::span<const int32_t> labels) {
  if (predictions.size() != labels.size()) throw DimensionError("accuracy: length mismatch");
  if (labels.empty()) return 0.0;
  size_t hit = 0;
  for (size_t k = 0; k < labels.size(); ++k) hit += predictions[k] == labels[k] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

double MicroF1(std::span<const int32_t> predictions, std::span<const int32_t> labels) {
  if (predictions.size() != labels.size()) throw DimensionError("micro-F1: length mismatch");
  // One wrong prediction is one FP (predicted class) and one FN (true class).
  size_t tp = 0;
  size_t wrong = 0;
  for (size_t k = 0; k < labels.size(); ++k) (predictions[k] == labels[k] ? tp : wrong) += 1;
  const double denom = 2.0 * static_cast<double>(tp) + 2.0 * static_cast<double>(wrong);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

double MicroF1(const Matrix& predictions, const Matrix& truth) {
  if (predictions.rows() != truth.rows() || predictions.cols() != truth.cols()) {
    throw DimensionError("micro-F1: shape mismatch");
  }
  double tp = 0, fp = 0, fn = 0;
  for (Eigen::Index k = 0; k < truth.size(); ++k) {
    const bool p = predictions.data()[k] > 0.5;
    const bool t = truth.data()[k] > 0.5;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2 * tp / denom;
}

double Auc(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) throw DomainError("AUC needs positives and negatives");
  struct Item {
    double score;
    bool pos;
  };
  std::vector<Item> items;
  items.reserve(positive.size() + negative.size());
  for (double s : positive) items.push_back({s, true});
  for (double s : negative) items.push_back({s, false});
  for (const Item& it : items) {
    if (std::isnan(it.score)) throw DomainError("AUC: NaN score");
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });
  // Sum of 1-based ranks of positives, ties sharing their average rank.
  double rank_sum = 0.0;
  size_t i = 0;
  while (i < items.size()) {
    size_t j = i;
    size_t pos_in_group = 0;
    while (j < items.size() && items[j].score == items[i].score) pos_in_group += items[j++].pos;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += avg_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double np = static_cast<double>(positive.size());
  const double nn = static_cast<double>(negative.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<std::string> EvalReport::MetricNames() const {
  std::vector<std::string> names;
  for (const auto& run : runs) {
    for (const auto& [name, value] : run.metrics) {
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
  }
  return names;
}

std::vector<double> EvalReport::Values(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& run : runs) {
    for (const auto& [name, value] : run.metrics) {
      if (name == metric) out.push_back(value);
    }
  }
  return out;
}

double EvalReport::Mean(const std::string& metric) const {
  const auto v = Values(metric);
  if (v.empty()) throw ValidationError("report has no metric '" + metric + "'");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double EvalReport::Std(const std::string& metric) const {
  const auto v = Values(metric);
  const double mean = Mean(metric);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::string EvalReport::ToText() const {
  std::ostringstream out;
  out << "task = " << task << "\n";
  out << "runs = " << runs.size() << "\n";
  for (const auto& name : MetricNames()) {
    out << name << ".mean = " << FormatDouble(Mean(name)) << "\n";
    out << name << ".std = " << FormatDouble(Std(name)) << "\n";
  }
  for (const auto& [key, value] : config) out << "config." << key << " = " << value << "\n";
  out << "seconds = " << FormatDouble(seconds) << "\n";
  return out.str();
}

EvalReport LogisticEval(const Matrix& embeddings, std::span<const int32_t> labels,
                        int32_t num_classes, std::span<const NodeId> train,
                        std::span<const NodeId> test, int runs, uint64_t seed,
                        const LogisticConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (static_cast<size_t>(embeddings.rows()) != labels.size()) {
    throw DimensionError("embeddings have " + std::to_string(embeddings.rows()) + " rows for " +
                         std::to_string(labels.size()) + " labels");
  }
  if (runs < 1) throw ConfigError("runs must be >= 1");
  const std::set<NodeId> train_set(train.begin(), train.end());
  for (NodeId v : test) {
    if (train_set.contains(v)) throw ValidationError("train and test masks overlap");
  }
  std::vector<int32_t> y_train, y_test;
  std::vector<bool> seen(static_cast<size_t>(num_classes), false);
  for (NodeId v : train) {
    y_train.push_back(labels[v]);
    if (labels[v] >= 0 && labels[v] < num_classes) seen[static_cast<size_t>(labels[v])] = true;
  }
  for (int32_t c = 0; c < num_classes; ++c) {
    if (!seen[static_cast<size_t>(c)]) {
      throw ValidationError("class " + std::to_string(c) + " has no training node");
    }
  }
  for (NodeId v : test) y_test.push_back(labels[v]);
  const Matrix x_train = Rows(embeddings, train);
  const Matrix x_test = Rows(embeddings, test);

  EvalReport report;
  report.task = "classification";
  for (int r = 0; r < runs; ++r) {
    const uint64_t run_seed = StreamSeed(seed, "classifier-" + std::to_string(r));
    Rng rng(run_seed);
    const LogisticModel model = FitLogistic(x_train, y_train, num_classes, config, rng);
    const auto pred = model.Predict(x_test);
    report.runs.push_back(
        {r, run_seed, {{"accuracy", Accuracy(pred, y_test)}, {"micro_f1", MicroF1(pred, y_test)}}});
  }
  report.Echo("l2", FormatDouble(config.l2));
  report.Echo("iterations", std::to_string(config.iterations));
  report.Echo("classifier_lr", FormatDouble(config.learning_rate));
  report.Echo("train_nodes", std::to_string(train.size()));
  report.Echo("test_nodes", std::to_string(test.size()));
  report.seconds = Seconds(start);
  return report;
}

double SelectL2(const Matrix& embeddings, std::span<const int32_t> labels, int32_t num_classes,
                std::span<const NodeId> train, std::span<const NodeId> val, uint64_t seed,
                std::span<const double> grid, LogisticConfig config) {
  if (grid.empty()) throw ConfigError("l2 grid is empty");
  if (val.empty()) throw ValidationError("l2 selection needs validation nodes");
  double best = grid.front();
  double best_acc = -1.0;
  for (double l2 : grid) {
    config.l2 = l2;
    const double acc =
        LogisticEval(embeddings, labels, num_classes, train, val, 1, seed, config).Mean("accuracy");
    if (acc > best_acc) {
      best_acc = acc;
      best = l2;
    }
  }
  return best;
}

std::vector<Edge> SampleNonEdges(const Graph& original, size_t count, Rng& rng) {
  const auto n = static_cast<uint64_t>(original.num_nodes());
  const uint64_t all_pairs = n * (n - 1) / 2;
  if (n < 2 || all_pairs - original.num_edges() < count) {
    throw DomainError("graph has fewer than " + std::to_string(count) + " non-adjacent pairs");
  }
  std::set<Edge> chosen;
  std::vector<Edge> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto a = static_cast<NodeId>(UniformIndex(rng, n));
    const auto b = static_cast<NodeId>(UniformIndex(rng, n));
    if (a == b || original.HasEdge(a, b)) continue;
    const Edge e = MakeEdge(a, b);
    if (chosen.insert(e).second) out.push_back(e);
  }
  return out;
}

EvalReport LinkAuc(const Matrix& h, std::span<const Edge> removed, const Graph& original,
                   uint64_t seed, int runs) {
  const auto start = std::chrono::steady_clock::now();
  if (removed.empty()) throw ValidationError("link AUC needs at least one removed edge");
  if (h.rows() != original.num_nodes()) throw DimensionError("embedding rows != graph nodes");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  auto score = [&](const Edge& e) { return h.row(e.u).dot(h.row(e.v)); };
  std::vector<double> pos;
  pos.reserve(removed.size());
  for (const Edge& e : removed) pos.push_back(score(e));

  EvalReport report;
  report.task = "linkpred";
  for (int r = 0; r < runs; ++r) {
    const uint64_t run_seed = StreamSeed(seed, "link-negatives-" + std::to_string(r));
    Rng rng(run_seed);
    std::vector<double> neg;
    for (const Edge& e : SampleNonEdges(original, removed.size(), rng)) neg.push_back(score(e));
    report.runs.push_back({r, run_seed, {{"auc", Auc(pos, neg)}}});
  }
  report.Echo("removed_edges", std::to_string(removed.size()));
  report.seconds = Seconds(start);
  return report;
}

void ExportEmbeddingsText(const std::filesystem::path& path, const Graph& graph, const Matrix& h) {
  if (h.rows() != graph.num_nodes()) throw DimensionError("embedding rows != graph nodes");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    out << graph.NodeName(static_cast<NodeId>(r)) << '\t';
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (c > 0) out << ' ';
      out << FormatDouble(h(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

void ExportEmbeddingsBinary(const std::filesystem::path& path, const Graph& graph, const Matrix& h) {
  if (h.rows() != graph.num_nodes()) throw DimensionError("embedding rows != graph nodes");
  BinaryWriter w(path);
  w.WriteHeader(kEmbeddingMagic, kEmbeddingVersion);
  w.WriteU64(static_cast<uint64_t>(h.rows()));
  w.WriteU64(static_cast<uint64_t>(h.cols()));
  w.WriteF64Array({h.data(), static_cast<size_t>(h.size())});
  for (Eigen::Index r = 0; r < h.rows(); ++r) w.WriteString(graph.NodeName(static_cast<NodeId>(r)));
  w.Close();
}

Matrix LoadEmbeddingsBinary(const std::filesystem::path& path, std::vector<std::string>* ids) {
  BinaryReader r(path);
  const uint32_t version = r.ReadHeader(kEmbeddingMagic);
  if (version != kEmbeddingVersion) {
    throw ParseError(path.string() + ": unsupported embedding file version " + std::to_string(version));
  }
  const uint64_t rows = r.ReadU64();
  const uint64_t cols = r.ReadU64();
  const std::vector<double> raw = r.ReadF64Array(rows * cols);
  Matrix h = Eigen::Map<const Matrix>(raw.data(), static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(cols));
  std::vector<std::string> names;
  for (uint64_t k = 0; k < rows; ++k) names.push_back(r.ReadString());
  if (ids != nullptr) *ids = std::move(names);
  return h;
}

Matrix LoadEmbeddingsText(const std::filesystem::path& path, std::vector<std::string>* ids) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": missing tab after id");
    }
    names.push_back(line.substr(0, tab));
    std::vector<double> row;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value");
      }
      row.push_back(v);
      p = next;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Matrix h(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (ids != nullptr) *ids = std::move(names);
  return h;
}

}  // namespace gmi
