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

#include "gmi/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gmi/binary_io.hpp"
#include "gmi/error.hpp"
#include "gmi/eval.hpp"
#include "gmi/sampling.hpp"

namespace gmi {
namespace {

constexpr std::string_view kCheckpointMagic = "GMIC";
constexpr uint32_t kCheckpointVersion = 1;

void WriteDiscriminators(BinaryWriter& out, const std::vector<Discriminator>& discs) {
  out.WriteU32(static_cast<uint32_t>(discs.size()));
  for (const auto& d : discs) WriteMatrix(out, d.theta.value);
}

std::vector<Discriminator> ReadDiscriminators(BinaryReader& in,
                                              const std::vector<Discriminator>& expected) {
  const uint32_t count = in.ReadU32();
  if (count != expected.size()) {
    throw ValidationError("checkpoint has " + std::to_string(count) + " discriminators, expected " +
                          std::to_string(expected.size()));
  }
  std::vector<Discriminator> out;
  for (uint32_t k = 0; k < count; ++k) {
    Matrix theta = ReadMatrix(in);
    const Matrix& want = expected[k].theta.value;
    if (theta.rows() != want.rows() || theta.cols() != want.cols()) {
      throw ValidationError("checkpoint discriminator " + std::to_string(k) + " has shape " +
                            std::to_string(theta.rows()) + "x" + std::to_string(theta.cols()));
    }
    out.push_back({Parameter(expected[k].theta.name, std::move(theta))});
  }
  return out;
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace

void AdamStep(std::span<Parameter* const> params, AdamState& state, double learning_rate) {
  if (state.m.empty() && state.t == 0) {
    for (const Parameter* p : params) {
      state.m.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      state.v.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (state.m.size() != params.size()) {
    throw DimensionError("Adam state tracks " + std::to_string(state.m.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols() ||
        state.m[k].rows() != p.value.rows() || state.m[k].cols() != p.value.cols()) {
      throw DimensionError("Adam: shape mismatch for parameter '" + p.name + "'");
    }
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * p.grad;
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= learning_rate * (state.m[k].array() / c1) /
                       ((state.v[k].array() / c2).sqrt() + state.eps);
  }
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (early_stop_window < 1) throw ConfigError("early_stop_window must be >= 1");
  if (fixed_epochs && *fixed_epochs < 0) throw ConfigError("fixed_epochs must be >= 0");
  if (subsample) {
    if (subsample->fanout1 < 1 || subsample->fanout2 < 1) throw ConfigError("fanouts must be >= 1");
    if (subsample->batch_size < 1) throw ConfigError("batch_size must be >= 1");
  }
}

std::string FormatHistory(std::span<const EpochRecord> history) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& r : history) {
    out << r.epoch << '\t' << r.loss << '\t' << r.fmi << '\t' << r.topology << '\n';
  }
  return out.str();
}

void WriteHistory(const std::filesystem::path& path, std::span<const EpochRecord> history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << FormatHistory(history);
  if (!out) throw Error("write failed: " + path.string());
}

Trainer::Trainer(const Graph& graph, EncoderConfig encoder, GmiConfig gmi, TrainConfig train)
    : graph_(graph),
      encoder_config_(encoder),
      gmi_(gmi),
      train_(train) {
  encoder_config_.Validate();
  gmi_.Validate();
  train_.Validate();
  graph_.Validate();
  if (train_.monitor_validation && (!graph_.has_labels() || !graph_.has_split())) {
    throw ConfigError("validation monitor needs labels and a split");
  }
  if (!train_.subsample) ops_ = GraphOperators::Build(graph_);
  const SeedStreams streams(train_.seed);
  Rng init = streams.Stream("init");
  encoder_ = InitEncoder(graph_.feature_dim(), encoder_config_, init);
  discriminators_ = InitDiscriminators(encoder_, graph_.feature_dim(), gmi_, init);
  negatives_rng_ = streams.Stream("negatives");
  subsample_rng_ = streams.Stream("subsample");
  best_score_ = -std::numeric_limits<double>::infinity();
  best_encoder_ = encoder_;
  best_discriminators_ = discriminators_;
}

std::vector<Parameter*> Trainer::AllParameters() {
  std::vector<Parameter*> out = encoder_.Parameters();
  for (auto& d : discriminators_) out.push_back(&d.theta);
  return out;
}

bool Trainer::Done() const {
  if (train_.fixed_epochs) return epoch_ >= *train_.fixed_epochs;
  return stopped_ || epoch_ >= train_.max_epochs;
}

GmiTerms Trainer::Forward(Tape& tape, const GraphOperators& ops, EncoderOutput& encoded) {
  const StepSamples samples = DrawStepSamples(ops, gmi_, negatives_rng_);
  try {
    encoded = Encode(tape, ops, encoder_);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("encoder: ") + e.what());
  }
  return GmiLoss(tape, ops, encoded, discriminators_, gmi_, encoder_config_.dense_gmi, samples);
}

EpochRecord Trainer::FullBatchEpoch() {
  EpochRecord rec;
  Tape tape;
  EncoderOutput encoded;
  const GmiTerms terms = Forward(tape, ops_, encoded);
  rec.loss = terms.loss.item();
  rec.fmi = terms.fmi.item();
  rec.topology = terms.topology.item();
  if (train_.monitor_validation) {
    const Matrix h = Standardize(encoded.h.value());
    const auto train_nodes = graph_.NodesWith(SplitTag::kTrain);
    const auto val_nodes = graph_.NodesWith(SplitTag::kVal);
    rec.val_accuracy = LogisticEval(h, graph_.labels(), graph_.num_classes(), train_nodes, val_nodes,
                                    1, StreamSeed(train_.seed, "eval"))
                           .Mean("accuracy");
  }
  tape.Backward(terms.loss);
  return rec;
}

EpochRecord Trainer::SubsampledEpoch() {
  const SubsampleConfig& cfg = *train_.subsample;
  std::vector<NodeId> order(static_cast<size_t>(graph_.num_nodes()));
  std::iota(order.begin(), order.end(), 0);
  Shuffle(std::span<NodeId>(order), subsample_rng_);
  EpochRecord rec;
  int batches = 0;
  for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
    const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
    const std::span<const NodeId> roots(order.data() + start, end - start);
    const SampledSubgraph sub =
        SubsampleNeighborhood(graph_, roots, cfg.fanout1, cfg.fanout2, subsample_rng_);
    const GraphOperators ops = GraphOperators::Build(sub.graph);
    Tape tape;
    EncoderOutput encoded;
    const GmiTerms terms = Forward(tape, ops, encoded);
    rec.loss += terms.loss.item();
    rec.fmi += terms.fmi.item();
    rec.topology += terms.topology.item();
    tape.Backward(terms.loss);
    ++batches;
    if (end < order.size()) {
      const auto params = AllParameters();
      AdamStep(params, adam_, train_.learning_rate);
      for (Parameter* p : params) p->ZeroGrad();
    }
  }
  rec.loss /= batches;
  rec.fmi /= batches;
  rec.topology /= batches;
  return rec;
}

EpochRecord Trainer::Step() {
  if (Done()) throw Error("training already finished");
  const int epoch = epoch_ + 1;
  const EncoderParams start_encoder = encoder_;
  const std::vector<Discriminator> start_discs = discriminators_;
  EpochRecord rec;
  const auto params = AllParameters();
  for (Parameter* p : params) p->ZeroGrad();
  try {
    rec = train_.subsample ? SubsampledEpoch() : FullBatchEpoch();
  } catch (const NumericalError& e) {
    throw NumericalError("epoch " + std::to_string(epoch) + ": " + e.what());
  }
  for (Parameter* p : params) {
    if (!AllFinite(p->grad)) {
      throw NumericalError("epoch " + std::to_string(epoch) + ": non-finite gradient for '" +
                           p->name + "'");
    }
  }
  rec.epoch = epoch;
  // The snapshot is the state the epoch started from.
  const double score = train_.monitor_validation ? *rec.val_accuracy : -rec.loss;
  if (score > best_score_) {
    best_score_ = score;
    best_epoch_ = epoch;
    best_encoder_ = start_encoder;
    best_discriminators_ = start_discs;
    patience_ = 0;
  } else if (++patience_ >= train_.early_stop_window && !train_.fixed_epochs) {
    stopped_ = true;
  }
  AdamStep(params, adam_, train_.learning_rate);
  for (Parameter* p : params) p->ZeroGrad();
  epoch_ = epoch;
  history_.push_back(rec);
  return rec;
}

TrainResult Trainer::Run(const std::function<void(const EpochRecord&)>& on_epoch) {
  while (!Done()) {
    const EpochRecord rec = Step();
    if (on_epoch) on_epoch(rec);
  }
  return Result();
}

TrainResult Trainer::Result() const {
  TrainResult out;
  out.history = history_;
  out.early_stopped = stopped_;
  if (train_.fixed_epochs) {
    out.encoder = encoder_;
    out.discriminators = discriminators_;
    out.best_epoch = epoch_;
  } else {
    out.encoder = best_encoder_;
    out.discriminators = best_discriminators_;
    out.best_epoch = best_epoch_;
  }
  return out;
}

void Trainer::SaveCheckpoint(const std::filesystem::path& path) const {
  BinaryWriter out(path);
  out.WriteHeader(kCheckpointMagic, kCheckpointVersion);
  WriteEncoder(out, encoder_);
  WriteDiscriminators(out, discriminators_);
  out.WriteI64(adam_.t);
  out.WriteU32(static_cast<uint32_t>(adam_.m.size()));
  for (size_t k = 0; k < adam_.m.size(); ++k) {
    WriteMatrix(out, adam_.m[k]);
    WriteMatrix(out, adam_.v[k]);
  }
  out.WriteI32(epoch_);
  out.WriteI32(best_epoch_);
  out.WriteF64(best_score_);
  out.WriteI32(patience_);
  out.WriteU8(stopped_ ? 1 : 0);
  out.WriteString(SerializeRng(negatives_rng_));
  out.WriteString(SerializeRng(subsample_rng_));
  WriteEncoder(out, best_encoder_);
  WriteDiscriminators(out, best_discriminators_);
  out.WriteU64(history_.size());
  for (const auto& r : history_) {
    out.WriteI32(r.epoch);
    out.WriteF64(r.loss);
    out.WriteF64(r.fmi);
    out.WriteF64(r.topology);
    out.WriteU8(r.val_accuracy ? 1 : 0);
    out.WriteF64(r.val_accuracy.value_or(0.0));
  }
  out.Close();
}

void Trainer::LoadCheckpoint(const std::filesystem::path& path) {
  BinaryReader in(path);
  const uint32_t version = in.ReadHeader(kCheckpointMagic);
  if (version != kCheckpointVersion) {
    throw ParseError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  EncoderParams encoder = ReadEncoder(in, &encoder_);
  std::vector<Discriminator> discs = ReadDiscriminators(in, discriminators_);
  AdamState adam;
  adam.t = in.ReadI64();
  const uint32_t moments = in.ReadU32();
  const auto params = AllParameters();
  if (moments != 0 && moments != params.size()) {
    throw ValidationError("checkpoint Adam state has " + std::to_string(moments) + " entries");
  }
  for (uint32_t k = 0; k < moments; ++k) {
    adam.m.push_back(ReadMatrix(in));
    adam.v.push_back(ReadMatrix(in));
    const Matrix& want = params[k]->value;
    if (adam.m.back().rows() != want.rows() || adam.m.back().cols() != want.cols() ||
        adam.v.back().rows() != want.rows() || adam.v.back().cols() != want.cols()) {
      throw ValidationError("checkpoint Adam moment " + std::to_string(k) + " has the wrong shape");
    }
  }
  const int epoch = in.ReadI32();
  const int best_epoch = in.ReadI32();
  const double best_score = in.ReadF64();
  const int patience = in.ReadI32();
  const bool stopped = in.ReadU8() != 0;
  Rng negatives = DeserializeRng(in.ReadString());
  Rng subsample = DeserializeRng(in.ReadString());
  EncoderParams best_encoder = ReadEncoder(in, &encoder_);
  std::vector<Discriminator> best_discs = ReadDiscriminators(in, discriminators_);
  std::vector<EpochRecord> history(in.ReadU64());
  for (auto& r : history) {
    r.epoch = in.ReadI32();
    r.loss = in.ReadF64();
    r.fmi = in.ReadF64();
    r.topology = in.ReadF64();
    const bool has_val = in.ReadU8() != 0;
    const double val = in.ReadF64();
    if (has_val) r.val_accuracy = val;
  }

  encoder_ = std::move(encoder);
  discriminators_ = std::move(discs);
  adam_ = std::move(adam);
  epoch_ = epoch;
  best_epoch_ = best_epoch;
  best_score_ = best_score;
  patience_ = patience;
  stopped_ = stopped;
  negatives_rng_ = negatives;
  subsample_rng_ = subsample;
  best_encoder_ = std::move(best_encoder);
  best_discriminators_ = std::move(best_discs);
  history_ = std::move(history);
}

TrainResult Train(const Graph& graph, const EncoderConfig& encoder, const GmiConfig& gmi,
                  const TrainConfig& train) {
  Trainer trainer(graph, encoder, gmi, train);
  return trainer.Run();
}

}  // namespace gmi
