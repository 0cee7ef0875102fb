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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "test_util.h"

namespace fedledger {
namespace {

using testing::RandomDataset;
using testing::RandomVector;
using testing::RelErr;

LabeledDataset OneExample(std::vector<double> x, int y) {
  LabeledDataset ds(x.size());
  ds.add_row(x, y);
  return ds;
}

double NaiveLogit(const RealVector& w, std::span<const double> x) {
  double z = w[x.size()];
  for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
  return z;
}

TEST(PredictTest, ZeroWeightsGiveOneHalf) {
  const ModelWeights w = ModelWeights::zeros(3);
  const double x[3] = {5.0, -2.0, 7.0};
  EXPECT_EQ(predict(w, x), 0.5);
  const ModelWeights w2(RealVector{1.0, 0.0});
  const double x2[1] = {0.0};
  EXPECT_EQ(predict(w2, x2), 0.5);
}

TEST(PredictTest, MatchesNaiveSigmoid) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 20;
    const ModelWeights w(RandomVector(gen, d + 1, -2, 2));
    const RealVector x = RandomVector(gen, d, -2, 2);
    const double want = 1.0 / (1.0 + std::exp(-NaiveLogit(w.values, x.view())));
    EXPECT_LE(RelErr(predict(w, x.view()), want), 1e-12);
  }
}

TEST(PredictTest, StaysStrictlyInsideUnitInterval) {
  const ModelWeights w(RealVector{1000.0, 0.0});
  const double big[1] = {1.0}, small[1] = {-1.0};
  EXPECT_LT(predict(w, big), 1.0);
  EXPECT_GT(predict(w, small), 0.0);
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(PredictTest, DimensionMismatchThrows) {
  const double x[2] = {1.0, 2.0};
  EXPECT_THROW(predict(ModelWeights::zeros(3), x), std::invalid_argument);
}

TEST(LocalLossTest, ZeroWeightsGiveLnTwo) {
  std::mt19937_64 gen(2);
  const LabeledDataset ds = RandomDataset(gen, 37, 5);
  EXPECT_NEAR(local_loss(ModelWeights::zeros(5), ds), std::log(2.0), 1e-15);
  EXPECT_NEAR(std::log(2.0), 0.693147, 1e-6);
}

TEST(LocalLossTest, ConfidentCorrectPrediction) {
  // Choose the bias so p = 0.99 for x = 0.
  const ModelWeights w(RealVector{0.0, std::log(0.99 / 0.01)});
  EXPECT_NEAR(local_loss(w, OneExample({0.0}, 1)), -std::log(0.99), 1e-12);
  EXPECT_NEAR(-std::log(0.99), 0.01005, 1e-5);
  const ModelWeights sure(RealVector{0.0, 40.0});
  EXPECT_LT(local_loss(sure, OneExample({0.0}, 1)), 1e-15);
}

TEST(LocalLossTest, MatchesNaivePerExampleSum) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 10;
    const LabeledDataset ds = RandomDataset(gen, 1 + trial % 25, d);
    const ModelWeights w(RandomVector(gen, d + 1, -1.5, 1.5));
    double sum = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      const double p = 1.0 / (1.0 + std::exp(-NaiveLogit(w.values, ds.row(r))));
      sum += ds.label(r) ? -std::log(p) : -std::log(1.0 - p);
    }
    EXPECT_LE(RelErr(local_loss(w, ds), sum / ds.rows()), 1e-12);
  }
}

TEST(LocalLossTest, ExtremeLogitsStayFinite) {
  const ModelWeights w(RealVector{800.0, 0.0});
  const double loss = local_loss(w, OneExample({1.0}, 0));
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 800.0, 1e-9);
}

TEST(LocalLossTest, EmptyDatasetThrows) {
  EXPECT_THROW(local_loss(ModelWeights::zeros(2), LabeledDataset(2)),
               std::invalid_argument);
}

TEST(LossGradientTest, SingleExample) {
  const RealVector g =
      loss_gradient(ModelWeights::zeros(1), OneExample({2.0}, 1));
  EXPECT_EQ(g, (RealVector{-1.0, -0.5}));
}

TEST(LossGradientTest, StationaryWhenLabelsMatchPredictions) {
  // Labels are 0/1 so exact agreement needs saturated predictions.
  LabeledDataset ds(1);
  const double pos[1] = {1.0}, neg[1] = {-1.0};
  ds.add_row(pos, 1);
  ds.add_row(neg, 0);
  const RealVector g = loss_gradient(ModelWeights(RealVector{60.0, 0.0}), ds);
  EXPECT_LT(l2_norm(g), 1e-20);
}

TEST(LossGradientTest, MatchesCentralFiniteDifferences) {
  std::mt19937_64 gen(4);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 20;
    const LabeledDataset ds = RandomDataset(gen, 1 + trial % 32, d);
    const ModelWeights w(RandomVector(gen, d + 1));
    const RealVector g = loss_gradient(w, ds);
    for (std::size_t j = 0; j <= d; ++j) {
      ModelWeights plus = w, minus = w;
      plus.values[j] += h;
      minus.values[j] -= h;
      const double fd = (local_loss(plus, ds) - local_loss(minus, ds)) / (2 * h);
      const double err = std::abs(g[j] - fd) / std::max(std::abs(fd), 1e-3);
      ASSERT_LE(err, 1e-5) << "trial " << trial << " coord " << j;
    }
  }
}

TEST(LossGradientTest, RowSubsetMatchesSubsetDataset) {
  std::mt19937_64 gen(5);
  const LabeledDataset ds = RandomDataset(gen, 40, 6);
  const ModelWeights w(RandomVector(gen, 7));
  const std::vector<std::size_t> rows = {3, 17, 5, 39, 0};
  EXPECT_EQ(loss_gradient(w, ds, rows), loss_gradient(w, ds.subset(rows)));
}

TEST(ClipGradientTest, Examples) {
  EXPECT_EQ(clip_gradient(RealVector{3, 4}, 2.5), (RealVector{1.5, 2.0}));
  EXPECT_EQ(clip_gradient(RealVector{1, 0}, 5.0), (RealVector{1, 0}));
  EXPECT_EQ(clip_gradient(RealVector(4, 0.0), 0.1), RealVector(4, 0.0));
}

TEST(ClipGradientTest, NormBoundAndIdentityBelowThreshold) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> cdist(0.01, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const RealVector g = RandomVector(gen, 1 + trial % 30, -5, 5);
    const double c = cdist(gen);
    const RealVector clipped = clip_gradient(g, c);
    ASSERT_LE(l2_norm(clipped), c * (1 + 1e-12));
    if (l2_norm(g) <= c) ASSERT_EQ(clipped, g);
  }
}

TEST(ClipGradientTest, NonPositiveClipThrows) {
  EXPECT_THROW(clip_gradient(RealVector{1.0}, 0.0), std::invalid_argument);
}

TEST(DpNoiseTest, ZeroSigmaIsIdentityAndDrawsNothing) {
  DpConfig dp;
  dp.noise_scale = 0.0;
  RngState rng = seeded_rng(1, 1);
  const RealVector g{0.3, -0.7};
  EXPECT_EQ(add_dp_noise(g, dp, rng), g);
  RngState fresh = seeded_rng(1, 1);
  EXPECT_EQ(rng.next_u64(), fresh.next_u64());
}

TEST(DpNoiseTest, ReproducibleForFixedSeed) {
  DpConfig dp;
  RngState a = seeded_rng(42, 5), b = seeded_rng(42, 5);
  const RealVector g{0.1, 0.2, 0.3};
  EXPECT_EQ(add_dp_noise(g, dp, a), add_dp_noise(g, dp, b));
}

TEST(DpNoiseTest, PerCoordinateStdMatchesSigmaTimesClip) {
  for (auto [sigma, c] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
    DpConfig dp;
    dp.noise_scale = sigma;
    dp.clip_norm = c;
    RngState rng = seeded_rng(7, 0);
    const RealVector g{0.25, -0.5, 1.0};
    std::vector<double> sum(3, 0.0), sq(3, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const RealVector noisy = add_dp_noise(g, dp, rng);
      for (int j = 0; j < 3; ++j) {
        const double e = noisy[j] - g[j];
        sum[j] += e;
        sq[j] += e * e;
      }
    }
    for (int j = 0; j < 3; ++j) {
      const double mean = sum[j] / n;
      const double sd = std::sqrt((sq[j] - n * mean * mean) / (n - 1));
      EXPECT_NEAR(sd, sigma * c, 0.05 * sigma * c);
      EXPECT_NEAR(mean, 0.0, 0.02 * sigma * c);
    }
  }
}

TEST(AnomalyScoreTest, PerfectAndAllWrong) {
  LabeledDataset ds(1);
  const double pos[1] = {1.0}, neg[1] = {-1.0};
  ds.add_row(pos, 1);
  ds.add_row(neg, 0);
  EXPECT_EQ(anomaly_score(ModelWeights(RealVector{5.0, 0.0}), ds), 0.0);
  EXPECT_EQ(anomaly_score(ModelWeights(RealVector{-5.0, 0.0}), ds), 1.0);
}

TEST(AnomalyScoreTest, HeadlineOperatingPoint) {
  // 973 of 1000 correct gives 0.027.
  LabeledDataset ds(1);
  const double pos[1] = {1.0};
  for (int i = 0; i < 1000; ++i) ds.add_row(pos, i < 973 ? 1 : 0);
  EXPECT_NEAR(anomaly_score(ModelWeights(RealVector{5.0, 0.0}), ds), 0.027,
              1e-15);
}

TEST(AnomalyScoreTest, TieClassifiesPositive) {
  const ModelWeights w = ModelWeights::zeros(1);
  EXPECT_EQ(anomaly_score(w, OneExample({3.0}, 1)), 0.0);
  EXPECT_EQ(anomaly_score(w, OneExample({3.0}, 0)), 1.0);
}

TEST(AnomalyScoreTest, ComplementsAccuracyAndStaysInUnitInterval) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const LabeledDataset ds = RandomDataset(gen, 1 + trial, 4);
    const ModelWeights w(RandomVector(gen, 5));
    std::size_t correct = 0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      correct += (predict(w, ds.row(r)) >= 0.5 ? 1 : 0) == ds.label(r);
    }
    const double a = anomaly_score(w, ds);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_EQ(a + static_cast<double>(correct) / ds.rows(), 1.0);
  }
}

TEST(TrainConfigTest, Validation) {
  TrainConfig t;
  t.local_epochs = 0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.batch_size = 0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.learning_rate = 0.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  DpConfig dp;
  dp.noise_scale = -1.0;
  EXPECT_THROW(dp.validate(), std::invalid_argument);
}

NodeState MakeNode(LabeledDataset train, LabeledDataset holdout = {}) {
  NodeState n;
  n.train = std::move(train);
  n.holdout = std::move(holdout);
  return n;
}

TEST(LocalTrainingTest, SingleGradientStep) {
  const NodeState node = MakeNode(OneExample({2.0}, 1));
  TrainConfig train;
  train.learning_rate = 0.1;
  train.local_epochs = 1;
  DpConfig dp;
  dp.noise_scale = 0.0;
  dp.clip_norm = 1e9;
  RngState rng = seeded_rng(0, 0);
  const LocalUpdate u =
      local_training_round(node, ModelWeights::zeros(1), train, dp, rng, 1);
  EXPECT_NEAR(u.weights.values[0], 0.1, 1e-15);
  EXPECT_NEAR(u.weights.values[1], 0.05, 1e-15);
  EXPECT_EQ(u.sample_count, 1u);
  EXPECT_EQ(u.round_index, 1u);
}

TEST(LocalTrainingTest, LargeBatchMeansFullBatchSteps) {
  std::mt19937_64 gen(9);
  const LabeledDataset ds = RandomDataset(gen, 30, 3);
  TrainConfig train;
  train.local_epochs = 4;
  train.batch_size = 64;
  DpConfig dp;
  dp.noise_scale = 0.0;
  dp.clip_norm = 1e9;
  RngState rng = seeded_rng(1, 1);
  const LocalUpdate u = local_training_round(MakeNode(ds), ModelWeights::zeros(3),
                                             train, dp, rng, 1);
  // Full-batch GD from the same start; row order does not matter for the
  // mean gradient up to rounding.
  RealVector w(4, 0.0);
  for (int e = 0; e < 4; ++e) {
    w = axpy(w, -train.learning_rate, loss_gradient(ModelWeights(w), ds));
  }
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(u.weights.values[j], w[j], 1e-14);
  }
}

// Independent minibatch SGD: the only shared piece is the shuffle order,
// reproduced from the same seed.
RealVector ReferenceSgd(const LabeledDataset& ds, RealVector w,
                        const TrainConfig& train, double clip,
                        RngState rng) {
  const std::size_t d = ds.dim();
  std::vector<std::size_t> order(ds.rows());
  for (std::size_t e = 0; e < train.local_epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_in_place(std::span(order), rng);
    for (std::size_t b = 0; b < order.size(); b += train.batch_size) {
      const std::size_t end = std::min(order.size(), b + train.batch_size);
      std::vector<double> g(d + 1, 0.0);
      for (std::size_t k = b; k < end; ++k) {
        auto x = ds.row(order[k]);
        double z = w[d];
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        const double err = 1.0 / (1.0 + std::exp(-z)) - ds.label(order[k]);
        for (std::size_t j = 0; j < d; ++j) g[j] += err * x[j];
        g[d] += err;
      }
      double norm = 0.0;
      for (auto& v : g) {
        v /= static_cast<double>(end - b);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      const double s = norm > clip ? clip / norm : 1.0;
      for (std::size_t j = 0; j <= d; ++j) w[j] -= train.learning_rate * g[j] * s;
    }
  }
  return w;
}

TEST(LocalTrainingTest, NoiselessRunMatchesReferenceSgd) {
  std::mt19937_64 gen(10);
  for (double clip : {1e9, 0.05}) {
    const LabeledDataset ds = RandomDataset(gen, 203, 8);
    TrainConfig train;
    train.learning_rate = 0.05;
    train.local_epochs = 3;
    train.batch_size = 16;
    DpConfig dp;
    dp.noise_scale = 0.0;
    dp.clip_norm = clip;
    const ModelWeights start(RandomVector(gen, 9, -0.1, 0.1));
    RngState rng = seeded_rng(77, 1000);
    const LocalUpdate u =
        local_training_round(MakeNode(ds), start, train, dp, rng, 3);
    const RealVector want =
        ReferenceSgd(ds, start.values, train, clip, seeded_rng(77, 1000));
    for (std::size_t j = 0; j < want.dim(); ++j) {
      EXPECT_LE(std::abs(u.weights.values[j] - want[j]),
                1e-12 * std::max(1.0, std::abs(want[j])));
    }
  }
}

TEST(LocalTrainingTest, NoiselessRunIsBitReproducible) {
  std::mt19937_64 gen(11);
  const LabeledDataset ds = RandomDataset(gen, 100, 5);
  DpConfig dp;
  dp.noise_scale = 0.0;
  RngState a = seeded_rng(3, 3), b = seeded_rng(3, 3);
  const auto ua = local_training_round(MakeNode(ds), ModelWeights::zeros(5),
                                       TrainConfig{}, dp, a, 1);
  const auto ub = local_training_round(MakeNode(ds), ModelWeights::zeros(5),
                                       TrainConfig{}, dp, b, 1);
  EXPECT_EQ(ua.weights, ub.weights);
}

TEST(LocalTrainingTest, AnomalyUsesHoldoutWhenPresent) {
  LabeledDataset train(1), holdout(1);
  const double pos[1] = {1.0};
  train.add_row(pos, 1);
  holdout.add_row(pos, 0);
  TrainConfig tc;
  tc.local_epochs = 1;
  DpConfig dp;
  dp.noise_scale = 0.0;
  RngState rng = seeded_rng(0, 0);
  const auto with_holdout = local_training_round(
      MakeNode(train, holdout), ModelWeights::zeros(1), tc, dp, rng, 1);
  EXPECT_EQ(with_holdout.anomaly_score, 1.0);
  const auto without = local_training_round(MakeNode(train),
                                            ModelWeights::zeros(1), tc, dp, rng, 1);
  EXPECT_EQ(without.anomaly_score, 0.0);
}

TEST(LocalTrainingTest, PerRoundNoiseModeAddsSingleDraw) {
  std::mt19937_64 gen(12);
  const LabeledDataset ds = RandomDataset(gen, 50, 3);
  DpConfig quiet;
  quiet.noise_scale = 0.0;
  DpConfig round_noise;
  round_noise.mode = NoiseMode::kPerRound;
  TrainConfig tc;
  tc.local_epochs = 1;
  RngState r1 = seeded_rng(4, 4), r2 = seeded_rng(4, 4);
  const auto a = local_training_round(MakeNode(ds), ModelWeights::zeros(3), tc,
                                      quiet, r1, 1);
  const auto b = local_training_round(MakeNode(ds), ModelWeights::zeros(3), tc,
                                      round_noise, r2, 1);
  // After identical shuffles both generators are in the same state; the
  // difference is lr times one Gaussian draw with std sigma * C.
  const RealVector expected_noise = gaussian_sample(r1, 0.0, 1.0, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(b.weights.values[j],
                a.weights.values[j] - tc.learning_rate * expected_noise[j],
                1e-15);
  }
}

TEST(LocalTrainingTest, EmptyTrainingSetThrows) {
  RngState rng = seeded_rng(0, 0);
  EXPECT_THROW(local_training_round(MakeNode(LabeledDataset(2)),
                                    ModelWeights::zeros(2), TrainConfig{},
                                    DpConfig{}, rng, 1),
               std::invalid_argument);
}

}  // namespace
}  // namespace fedledger
