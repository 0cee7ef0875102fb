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

#include "fedledger/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedledger {

namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
constexpr double kProbCeil = 0x1.fffffffffffffp-1;  // largest double < 1

double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void CheckDims(const ModelWeights& weights, std::size_t feature_dim) {
  if (weights.dim() != feature_dim + 1) {
    throw std::invalid_argument(
        "model: weights have dim " + std::to_string(weights.dim()) +
        " but features have dim " + std::to_string(feature_dim) +
        " (expected weights dim = features + 1)");
  }
}

}  // namespace

void DpConfig::validate() const {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("dp: clip_norm must be > 0");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw std::invalid_argument("dp: noise_scale must be >= 0");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("train: learning_rate must be > 0");
  }
  if (local_epochs == 0) {
    throw std::invalid_argument("train: local_epochs must be positive");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("train: batch_size must be positive");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("train: threshold must be in (0, 1)");
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(const ModelWeights& weights, std::span<const double> features) {
  CheckDims(weights, features.size());
  const auto w = weights.values.view();
  double z = w.back();
  for (std::size_t i = 0; i < features.size(); ++i) z += w[i] * features[i];
  return z;
}

double predict(const ModelWeights& weights, std::span<const double> features) {
  return std::clamp(sigmoid(logit(weights, features)), kProbFloor, kProbCeil);
}

double local_loss(const ModelWeights& weights, const LabeledDataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("local_loss: empty dataset");
  CheckDims(weights, dataset.dim());
  double total = 0.0;
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    const double z = logit(weights, dataset.row(r));
    // -[y log p + (1 - y) log(1 - p)] == softplus(z) - y z
    total += Softplus(z) - static_cast<double>(dataset.label(r)) * z;
  }
  return total / static_cast<double>(dataset.rows());
}

RealVector loss_gradient(const ModelWeights& weights,
                         const LabeledDataset& dataset,
                         std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("loss_gradient: empty batch");
  CheckDims(weights, dataset.dim());
  const std::size_t d = dataset.dim();
  RealVector grad(d + 1, 0.0);
  for (std::size_t r : rows) {
    const auto x = dataset.row(r);
    const double err =
        sigmoid(logit(weights, x)) - static_cast<double>(dataset.label(r));
    for (std::size_t i = 0; i < d; ++i) grad[i] += err * x[i];
    grad[d] += err;
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i <= d; ++i) grad[i] *= inv;
  return grad;
}

RealVector loss_gradient(const ModelWeights& weights,
                         const LabeledDataset& batch) {
  std::vector<std::size_t> rows(batch.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return loss_gradient(weights, batch, rows);
}

RealVector clip_gradient(const RealVector& g, double clip_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("clip_gradient: clip norm must be > 0");
  }
  const double norm = l2_norm(g);
  if (norm <= clip_norm) return g;
  const double divisor = norm / clip_norm;
  RealVector out(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) out[i] = g[i] / divisor;
  return out;
}

RealVector add_dp_noise(const RealVector& g, const DpConfig& dp,
                        RngState& rng) {
  if (dp.noise_scale == 0.0) return g;
  const RealVector noise =
      gaussian_sample(rng, 0.0, dp.noise_scale * dp.clip_norm, g.dim());
  return add(g, noise);
}

double anomaly_score(const ModelWeights& weights,
                     const LabeledDataset& eval_set, double threshold) {
  if (eval_set.empty()) {
    throw std::invalid_argument("anomaly_score: empty evaluation set");
  }
  std::size_t correct = 0;
  for (std::size_t r = 0; r < eval_set.rows(); ++r) {
    const int predicted = predict(weights, eval_set.row(r)) >= threshold;
    if (predicted == eval_set.label(r)) ++correct;
  }
  const double accuracy =
      static_cast<double>(correct) / static_cast<double>(eval_set.rows());
  return 1.0 - accuracy;
}

LocalUpdate local_training_round(const NodeState& node,
                                 const ModelWeights& start,
                                 const TrainConfig& train, const DpConfig& dp,
                                 RngState& rng, std::uint64_t round_index) {
  train.validate();
  dp.validate();
  const LabeledDataset& data = node.train;
  if (data.empty()) {
    throw std::invalid_argument("local_training_round: node " +
                                std::to_string(node.node_id) +
                                " has no training data");
  }
  CheckDims(start, data.dim());

  DpConfig step_dp = dp;
  if (dp.mode == NoiseMode::kPerRound) step_dp.noise_scale = 0.0;

  RealVector w = start.values;
  std::vector<std::size_t> order(data.rows());
  for (std::size_t epoch = 0; epoch < train.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_in_place(std::span(order), rng);
    for (std::size_t begin = 0; begin < order.size();
         begin += train.batch_size) {
      const std::size_t count =
          std::min(train.batch_size, order.size() - begin);
      const std::span<const std::size_t> batch(order.data() + begin, count);
      const RealVector g =
          loss_gradient(ModelWeights(w), data, batch);
      const RealVector noisy =
          add_dp_noise(clip_gradient(g, dp.clip_norm), step_dp, rng);
      w = axpy(w, -train.learning_rate, noisy);
    }
  }
  if (dp.mode == NoiseMode::kPerRound && dp.noise_scale > 0.0) {
    const RealVector zero(w.dim(), 0.0);
    w = axpy(w, -train.learning_rate, add_dp_noise(zero, dp, rng));
  }

  LocalUpdate update;
  update.node_id = node.node_id;
  update.weights = ModelWeights(std::move(w));
  update.round_index = round_index;
  update.sample_count = data.rows();
  update.anomaly_score =
      anomaly_score(update.weights, node.holdout.empty() ? data : node.holdout,
                    train.threshold);
  update.payload = encode_dense(update.weights.values);
  return update;
}

}  // namespace fedledger
