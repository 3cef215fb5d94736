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

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "gmi/binary_io.hpp"
#include "gmi/error.hpp"
#include "gmi/graph.hpp"

namespace gmi {
namespace {

constexpr std::string_view kGraphMagic = "GMIG";
constexpr uint32_t kGraphVersion = 1;

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ' || line[i] == '\r')) ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != '\t' && line[i] != ' ' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string Where(const std::filesystem::path& path, size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

std::ifstream OpenText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

Graph LoadCitationDataset(const std::filesystem::path& content_path,
                          const std::filesystem::path& cites_path) {
  std::ifstream content = OpenText(content_path);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<int32_t> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, NodeId> index_of;
  std::unordered_map<std::string, int32_t> class_of;

  std::string line;
  size_t line_no = 0;
  size_t width = 0;
  while (std::getline(content, line)) {
    ++line_no;
    const auto tokens = Tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3) {
      throw ParseError(Where(content_path, line_no) + ": expected id, features and label, got " +
                       std::to_string(tokens.size()) + " fields");
    }
    if (width == 0) width = tokens.size();
    if (tokens.size() != width) {
      throw ParseError(Where(content_path, line_no) + ": expected " + std::to_string(width) +
                       " fields, got " + std::to_string(tokens.size()));
    }
    std::string id(tokens.front());
    if (index_of.contains(id)) {
      throw ValidationError(Where(content_path, line_no) + ": duplicate node id '" + id + "'");
    }
    std::vector<double> row(width - 2);
    for (size_t k = 1; k + 1 < width; ++k) {
      const std::string_view tok = tokens[k];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(Where(content_path, line_no) + ": non-numeric feature '" +
                         std::string(tok) + "' in column " + std::to_string(k));
      }
      row[k - 1] = v;
    }
    std::string label(tokens.back());
    auto [it, inserted] = class_of.try_emplace(label, static_cast<int32_t>(class_names.size()));
    if (inserted) class_names.push_back(label);
    index_of.emplace(id, static_cast<NodeId>(ids.size()));
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
    labels.push_back(it->second);
  }

  const auto n = static_cast<NodeId>(ids.size());
  const int64_t dim = width >= 2 ? static_cast<int64_t>(width) - 2 : 0;
  Matrix features(n, dim);
  for (NodeId i = 0; i < n; ++i) {
    for (int64_t k = 0; k < dim; ++k) features(i, k) = rows[i][k];
  }
  rows.clear();

  std::ifstream cites = OpenText(cites_path);
  std::vector<Edge> edges;
  GraphMetadata meta;
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    const auto tokens = Tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError(Where(cites_path, line_no) + ": expected 2 node ids, got " +
                       std::to_string(tokens.size()) + " fields");
    }
    ++meta.raw_citations;
    auto a = index_of.find(std::string(tokens[0]));
    auto b = index_of.find(std::string(tokens[1]));
    if (a == index_of.end() || b == index_of.end()) {
      ++meta.dropped_edges;
      continue;
    }
    edges.push_back({a->second, b->second});
  }

  Graph g = Graph::FromEdges(n, edges, std::move(features));
  GraphMetadata built = g.metadata();
  meta.duplicate_edges = built.duplicate_edges;
  meta.self_loops = built.self_loops;
  return g.WithLabels(std::move(labels), std::move(class_names))
      .WithNodeIds(std::move(ids))
      .WithMetadata(meta);
}

std::vector<SplitTag> LoadSplitFile(const std::filesystem::path& path, NodeId num_nodes) {
  std::ifstream in = OpenText(path);
  std::vector<SplitTag> split;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = Tokenize(line);
    if (tokens.size() != 1) {
      throw ParseError(Where(path, line_no) + ": expected one of train/val/test/none");
    }
    const std::string_view t = tokens[0];
    if (t == "train") split.push_back(SplitTag::kTrain);
    else if (t == "val") split.push_back(SplitTag::kVal);
    else if (t == "test") split.push_back(SplitTag::kTest);
    else if (t == "none") split.push_back(SplitTag::kNone);
    else throw ParseError(Where(path, line_no) + ": unknown split token '" + std::string(t) + "'");
  }
  if (split.size() != static_cast<size_t>(num_nodes)) {
    throw ValidationError(path.string() + ": " + std::to_string(split.size()) + " split lines for " +
                          std::to_string(num_nodes) + " nodes");
  }
  return split;
}

void SaveSplitFile(const std::filesystem::path& path, std::span<const SplitTag> split) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (SplitTag t : split) {
    switch (t) {
      case SplitTag::kTrain: out << "train\n"; break;
      case SplitTag::kVal: out << "val\n"; break;
      case SplitTag::kTest: out << "test\n"; break;
      case SplitTag::kNone: out << "none\n"; break;
    }
  }
}

void SaveGraphCache(const std::filesystem::path& path, const Graph& graph) {
  BinaryWriter w(path);
  w.WriteHeader(kGraphMagic, kGraphVersion);
  const CsrMatrix& a = graph.adjacency();
  w.WriteU64(static_cast<uint64_t>(graph.num_nodes()));
  w.WriteU64(static_cast<uint64_t>(graph.feature_dim()));
  w.WriteU64(a.nnz());
  w.WriteI64Array(a.offsets);
  w.WriteI32Array(a.columns);
  w.WriteF64Array(a.values);
  w.WriteF64Array({graph.features().data(), static_cast<size_t>(graph.features().size())});

  w.WriteU8(graph.has_labels() ? 1 : 0);
  if (graph.has_labels()) {
    w.WriteI32Array(graph.labels());
    w.WriteU64(graph.class_names().size());
    for (const auto& name : graph.class_names()) w.WriteString(name);
  }
  w.WriteU8(graph.has_split() ? 1 : 0);
  if (graph.has_split()) {
    std::vector<uint8_t> raw;
    for (SplitTag t : graph.split()) raw.push_back(static_cast<uint8_t>(t));
    w.WriteU8Array(raw);
  }
  w.WriteU8(graph.node_ids().empty() ? 0 : 1);
  for (const auto& id : graph.node_ids()) w.WriteString(id);

  const GraphMetadata& m = graph.metadata();
  w.WriteU64(m.raw_citations);
  w.WriteU64(m.dropped_edges);
  w.WriteU64(m.duplicate_edges);
  w.WriteU64(m.self_loops);
  w.Close();
}

Graph LoadGraphCache(const std::filesystem::path& path) {
  BinaryReader r(path);
  const uint32_t version = r.ReadHeader(kGraphMagic);
  if (version != kGraphVersion) {
    throw ParseError(path.string() + ": unsupported graph cache version " + std::to_string(version));
  }
  const uint64_t n = r.ReadU64();
  const uint64_t dim = r.ReadU64();
  const uint64_t nnz = r.ReadU64();
  CsrMatrix a;
  a.rows = a.cols = static_cast<int64_t>(n);
  a.offsets = r.ReadI64Array(n + 1);
  a.columns = r.ReadI32Array(nnz);
  a.values = r.ReadF64Array(nnz);
  const std::vector<double> raw = r.ReadF64Array(n * dim);
  Matrix features = Eigen::Map<const Matrix>(raw.data(), static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(dim));
  Graph g(std::move(a), std::move(features));

  if (r.ReadU8()) {
    std::vector<int32_t> labels = r.ReadI32Array(n);
    const uint64_t classes = r.ReadU64();
    std::vector<std::string> names;
    for (uint64_t k = 0; k < classes; ++k) names.push_back(r.ReadString());
    g = g.WithLabels(std::move(labels), std::move(names));
  }
  if (r.ReadU8()) {
    std::vector<SplitTag> split;
    for (uint8_t v : r.ReadU8Array(n)) {
      if (v > 3) throw ParseError(path.string() + ": invalid split tag");
      split.push_back(static_cast<SplitTag>(v));
    }
    g = g.WithSplit(std::move(split));
  }
  if (r.ReadU8()) {
    std::vector<std::string> ids;
    for (uint64_t k = 0; k < n; ++k) ids.push_back(r.ReadString());
    g = g.WithNodeIds(std::move(ids));
  }
  GraphMetadata m;
  m.raw_citations = r.ReadU64();
  m.dropped_edges = r.ReadU64();
  m.duplicate_edges = r.ReadU64();
  m.self_loops = r.ReadU64();
  return g.WithMetadata(m);
}

}  // namespace gmi
