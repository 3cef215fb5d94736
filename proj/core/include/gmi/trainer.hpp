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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmi/encoder.hpp"
#include "gmi/objective.hpp"
#include "gmi/rng.hpp"

namespace gmi {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t t = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

/// One bias-corrected Adam update from each parameter's grad. Moments are
/// allocated on the first call; later shape changes are errors.
void AdamStep(std::span<Parameter* const> params, AdamState& state, double learning_rate);

struct SubsampleConfig {
  int fanout1 = 8;
  int fanout2 = 5;
  int batch_size = 256;
};

struct TrainConfig {
  double learning_rate = 0.001;
  int max_epochs = 300;
  int early_stop_window = 20;
  uint64_t seed = 0;
  /// Run exactly this many epochs, no early stopping, keep the final params.
  std::optional<int> fixed_epochs;
  std::optional<SubsampleConfig> subsample;
  /// Select and early-stop on validation accuracy instead of training loss.
  /// Needs labels and a split.
  bool monitor_validation = false;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double fmi = 0.0;
  double topology = 0.0;
  /// Only with monitor_validation.
  std::optional<double> val_accuracy;
};

struct TrainResult {
  EncoderParams encoder;
  std::vector<Discriminator> discriminators;
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0: initial parameters
  bool early_stopped = false;
};

/// `epoch\tloss\tfmi\ttopology` per line.
std::string FormatHistory(std::span<const EpochRecord> history);
void WriteHistory(const std::filesystem::path& path, std::span<const EpochRecord> history);

/// Full training state; one Step() per epoch. The graph must outlive it.
class Trainer {
 public:
  Trainer(const Graph& graph, EncoderConfig encoder, GmiConfig gmi, TrainConfig train);

  bool Done() const;
  /// Runs one epoch. Throws NumericalError naming the epoch and the
  /// offending term on a non-finite value.
  EpochRecord Step();
  /// Steps until Done().
  TrainResult Run(const std::function<void(const EpochRecord&)>& on_epoch = {});
  /// Best (or, with fixed_epochs, final) parameters so far.
  TrainResult Result() const;

  int epoch() const { return epoch_; }
  const std::vector<EpochRecord>& history() const { return history_; }
  EncoderParams& encoder() { return encoder_; }
  std::vector<Discriminator>& discriminators() { return discriminators_; }

  /// Magic "GMIC": parameters, Adam moments, epoch, RNG states, best
  /// snapshot, patience counter and history.
  void SaveCheckpoint(const std::filesystem::path& path) const;
  /// Restores into a trainer built with the same graph and configs.
  void LoadCheckpoint(const std::filesystem::path& path);

 private:
  std::vector<Parameter*> AllParameters();
  GmiTerms Forward(Tape& tape, const GraphOperators& ops, EncoderOutput& encoded);
  EpochRecord FullBatchEpoch();
  EpochRecord SubsampledEpoch();
  double ValidationAccuracy();
  void Track(const EpochRecord& record);

  const Graph& graph_;
  EncoderConfig encoder_config_;
  GmiConfig gmi_;
  TrainConfig train_;
  GraphOperators ops_;

  EncoderParams encoder_;
  std::vector<Discriminator> discriminators_;
  AdamState adam_;
  Rng negatives_rng_;
  Rng subsample_rng_;

  int epoch_ = 0;
  int best_epoch_ = 0;
  double best_score_ = 0.0;
  int patience_ = 0;
  bool stopped_ = false;
  EncoderParams best_encoder_;
  std::vector<Discriminator> best_discriminators_;
  std::vector<EpochRecord> history_;
};

/// Trains from scratch and returns the selected parameters.
TrainResult Train(const Graph& graph, const EncoderConfig& encoder, const GmiConfig& gmi,
                  const TrainConfig& train);

}  // namespace gmi
