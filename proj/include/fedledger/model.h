// Copyright 2026 The fedledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary logistic intrusion classifier and its DP-SGD local training round.

#ifndef FEDLEDGER_MODEL_H_
#define FEDLEDGER_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "fedledger/data.h"
#include "fedledger/numerics.h"
#include "fedledger/transport.h"

namespace fedledger {

using NodeId = std::uint32_t;

inline constexpr double kDefaultThreshold = 0.5;

// Logistic-regression parameters; the bias is the last coordinate, so
// dim() == feature_dim + 1.
struct ModelWeights {
  RealVector values;

  ModelWeights() = default;
  explicit ModelWeights(RealVector v) : values(std::move(v)) {}
  static ModelWeights zeros(std::size_t feature_dim) {
    return ModelWeights(RealVector(feature_dim + 1, 0.0));
  }

  std::size_t dim() const { return values.dim(); }
  std::size_t feature_dim() const { return values.dim() - 1; }

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

// Where the Gaussian perturbation enters local training.
enum class NoiseMode {
  kPerStep,   // every minibatch gradient is clipped and then perturbed
  kPerRound,  // gradients are clipped per step; one perturbation per round
};

struct DpConfig {
  double clip_norm = 1.0;
  double noise_scale = 1.0;
  NoiseMode mode = NoiseMode::kPerStep;

  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t local_epochs = 3;
  std::size_t batch_size = 64;
  double threshold = kDefaultThreshold;

  void validate() const;
};

struct NodeState {
  NodeId node_id = 0;
  LabeledDataset train;
  LabeledDataset holdout;
  bool poisoner = false;
};

// One node's round contribution as received by the aggregator.
struct LocalUpdate {
  NodeId node_id = 0;
  ModelWeights weights;
  double anomaly_score = 0.0;
  std::uint64_t round_index = 0;
  std::size_t sample_count = 0;
  UpdateEncoding payload;
};

double sigmoid(double z);

// w . [x, 1]. Throws std::invalid_argument on a dimension mismatch.
double logit(const ModelWeights& weights, std::span<const double> features);

// sigmoid(w . [x, 1]), clamped strictly inside (0, 1).
double predict(const ModelWeights& weights, std::span<const double> features);

// Mean binary cross-entropy over the dataset. Throws on an empty dataset.
double local_loss(const ModelWeights& weights, const LabeledDataset& dataset);

// Mean of (p - y) * [x, 1] over the batch. Throws on an empty batch.
RealVector loss_gradient(const ModelWeights& weights,
                         const LabeledDataset& batch);
RealVector loss_gradient(const ModelWeights& weights,
                         const LabeledDataset& dataset,
                         std::span<const std::size_t> rows);

// g / max(1, |g| / C). Returned unchanged when |g| <= C.
RealVector clip_gradient(const RealVector& g, double clip_norm);

// g + N(0, (sigma * C)^2 I). sigma == 0 returns g untouched and draws nothing.
RealVector add_dp_noise(const RealVector& g, const DpConfig& dp,
                        RngState& rng);

// 1 - local accuracy, with p >= threshold classified as attack.
double anomaly_score(const ModelWeights& weights,
                     const LabeledDataset& eval_set,
                     double threshold = kDefaultThreshold);

// Starting from `start`, runs train.local_epochs passes over node.train. Each
// pass visits the rows in the order produced by shuffle_in_place over
// [0, rows) with `rng`, in minibatches of train.batch_size (the last may be
// short). Every step computes the minibatch gradient, clips it, perturbs it
// according to dp.mode, and takes an SGD step. The anomaly score is measured
// on node.holdout, or on node.train when the holdout is empty. The returned
// payload is the dense encoding of the trained weights.
LocalUpdate local_training_round(const NodeState& node,
                                 const ModelWeights& start,
                                 const TrainConfig& train, const DpConfig& dp,
                                 RngState& rng, std::uint64_t round_index);

}  // namespace fedledger

#endif  // FEDLEDGER_MODEL_H_
