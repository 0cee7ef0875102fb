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


#include "fedledger/driver.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "fedledger/aggregation.h"
#include "fedledger/report_io.h"
#include "fedledger/transport.h"
#include "test_util.h"

namespace fedledger {
namespace {

SimulationConfig SmallConfig() {
  SimulationConfig c;
  c.synthetic.sample_count = 2000;
  c.synthetic.feature_dim = 8;
  c.rounds = 12;
  c.node_count = 5;
  return c;
}

LabeledDataset Line(std::vector<double> xs, std::vector<int> ys) {
  LabeledDataset ds(1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x[1] = {xs[i]};
    ds.add_row(x, ys[i]);
  }
  return ds;
}

TEST(ComputeMetricsTest, PerfectPredictions) {
  const LabeledDataset ds = Line({-2, -1, 1, 2}, {0, 0, 1, 1});
  const ClassificationMetrics m =
      compute_metrics(ModelWeights(RealVector{5.0, 0.0}), ds);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(ComputeMetricsTest, AllNegativePredictor) {
  const LabeledDataset ds = Line({1, 2, 3, 4, 5}, {0, 1, 0, 0, 1});
  const ClassificationMetrics m =
      compute_metrics(ModelWeights(RealVector{0.0, -10.0}), ds);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
}

TEST(ComputeMetricsTest, MatchesNaiveConfusionLoop) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const LabeledDataset ds = testing::RandomDataset(gen, 1 + trial * 3, 4);
    const ModelWeights w(testing::RandomVector(gen, 5));
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      double z = w.values[4];
      for (int j = 0; j < 4; ++j) z += w.values[j] * ds.row(r)[j];
      const bool pred = 1.0 / (1.0 + std::exp(-z)) >= 0.5;
      const bool act = ds.label(r) == 1;
      tp += pred && act;
      fp += pred && !act;
      tn += !pred && !act;
      fn += !pred && act;
    }
    const ClassificationMetrics m = compute_metrics(w, ds);
    EXPECT_EQ(m.true_positive, tp);
    EXPECT_EQ(m.false_positive, fp);
    EXPECT_EQ(m.true_negative, tn);
    EXPECT_EQ(m.false_negative, fn);
    EXPECT_EQ(m.accuracy, (tp + tn) / ds.rows());
    EXPECT_EQ(m.precision, tp + fp > 0 ? tp / (tp + fp) : 0.0);
    EXPECT_EQ(m.recall, tp + fn > 0 ? tp / (tp + fn) : 0.0);
  }
}

TEST(ComputeMetricsTest, EmptyTestSetThrows) {
  EXPECT_THROW(compute_metrics(ModelWeights::zeros(1), LabeledDataset(1)),
               std::invalid_argument);
}

struct PoisonFixture {
  NodeState node;
  ModelWeights global;
  LocalUpdate update;
  PoisonFixture() {
    std::mt19937_64 gen(2);
    node.train = testing::RandomDataset(gen, 40, 3);
    node.holdout = testing::RandomDataset(gen, 10, 3);
    global = ModelWeights(testing::RandomVector(gen, 4));
    update.weights = ModelWeights(testing::RandomVector(gen, 4));
    update.anomaly_score = anomaly_score(update.weights, node.holdout);
    update.sample_count = 40;
  }
};

TEST(InjectPoisonTest, ScaleOneIsIdentity) {
  PoisonFixture f;
  const LocalUpdate p = inject_poison(f.update, f.global, 1.0, f.node);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(p.weights.values[j], f.update.weights.values[j], 1e-15);
  }
  EXPECT_EQ(p.anomaly_score, f.update.anomaly_score);
  EXPECT_EQ(p.sample_count, f.update.sample_count);
}

TEST(InjectPoisonTest, NegativeFiveScalesDivergenceFiveFold) {
  PoisonFixture f;
  const LocalUpdate p = inject_poison(f.update, f.global, -5.0, f.node);
  EXPECT_LE(testing::RelErr(divergence(p.weights, f.global),
                            5.0 * divergence(f.update.weights, f.global)),
            1e-12);
  EXPECT_EQ(p.anomaly_score, anomaly_score(p.weights, f.node.holdout));
}

TEST(InjectPoisonTest, ScaleZeroReturnsPreviousGlobal) {
  PoisonFixture f;
  const LocalUpdate p = inject_poison(f.update, f.global, 0.0, f.node);
  EXPECT_EQ(p.weights, f.global);
  const Verdict v = validate_update(p, f.global, ContractPolicy{});
  EXPECT_EQ(v.divergence, 0.0);
  if (p.anomaly_score <= ContractPolicy{}.max_anomaly) {
    EXPECT_TRUE(v.accepted());
  }
}

TEST(RoundsToConvergenceTest, NeedsThreeSustainedRounds) {
  std::vector<RoundReport> rounds(8);
  const double acc[8] = {0.5, 0.96, 0.97, 0.9, 0.95, 0.96, 0.99, 0.97};
  for (int i = 0; i < 8; ++i) {
    rounds[i].round = i + 1;
    rounds[i].metrics.accuracy = acc[i];
  }
  EXPECT_EQ(rounds_to_convergence(rounds, 0.95), 5u);
  EXPECT_EQ(rounds_to_convergence(rounds, 0.999), std::nullopt);
  EXPECT_EQ(rounds_to_convergence(rounds, 0.95, 1), 2u);
}

TEST(PrepareDataTest, SplitsBeforePartitioning) {
  const SimulationConfig c = SmallConfig();
  const PreparedData d = prepare_data(c);
  EXPECT_EQ(d.test.rows(), 400u);
  std::size_t total = d.test.rows();
  for (const auto& node : d.nodes) {
    total += node.train.rows() + node.holdout.rows();
    EXPECT_EQ(node.holdout.rows(),
              static_cast<std::size_t>(
                  0.2 * (node.train.rows() + node.holdout.rows())));
  }
  EXPECT_EQ(total, 2000u);
}

TEST(PrepareDataTest, MarksPoisoners) {
  SimulationConfig c = SmallConfig();
  c.poisoned_nodes = {1, 3};
  const PreparedData d = prepare_data(c);
  for (const auto& node : d.nodes) {
    EXPECT_EQ(node.poisoner, node.node_id == 1 || node.node_id == 3);
  }
}

TEST(RunSimulationTest, NoiselessDefaultsCommitEveryRound) {
  SimulationConfig c;
  c.dp.noise_scale = 0.0;
  const SimulationResult r = run_simulation(c);
  ASSERT_EQ(r.report.rounds.size(), 50u);
  EXPECT_EQ(r.chain.height(), 50u);
  EXPECT_EQ(r.report.committed_blocks, 50u);
  EXPECT_TRUE(verify_chain(r.chain, &r.archive).valid);
  EXPECT_GE(r.report.final_metrics.accuracy, 0.95);
  for (const auto& round : r.report.rounds) {
    EXPECT_EQ(round.chain_height, round.round);
    for (double m : {round.metrics.accuracy, round.metrics.precision,
                     round.metrics.recall, round.metrics.f1}) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 1.0);
    }
  }
}

TEST(RunSimulationTest, ZeroRoundsEvaluatesInitialModelOnly) {
  SimulationConfig c = SmallConfig();
  c.rounds = 0;
  const SimulationResult r = run_simulation(c);
  EXPECT_TRUE(r.report.rounds.empty());
  EXPECT_EQ(r.chain.height(), 0u);
  EXPECT_EQ(r.report.final_metrics.accuracy, r.report.initial_metrics.accuracy);
  EXPECT_EQ(r.final_weights, ModelWeights::zeros(8));
  EXPECT_NE(summary_text(r).find("rounds = 0"), std::string::npos);
}

TEST(RunSimulationTest, DeterministicAcrossRunsAndThreadCounts) {
  SimulationConfig c = SmallConfig();
  c.poisoned_nodes = {2};
  const SimulationResult a = run_simulation(c);
  const SimulationResult b = run_simulation(c);
  c.threads = 3;
  const SimulationResult p = run_simulation(c);
  EXPECT_EQ(metrics_csv(a.report), metrics_csv(b.report));
  EXPECT_EQ(nodes_csv(a.report), nodes_csv(b.report));
  EXPECT_EQ(a.chain.tip_hash(), b.chain.tip_hash());
  EXPECT_EQ(metrics_csv(a.report), metrics_csv(p.report));
  EXPECT_EQ(a.chain.hashes(), p.chain.hashes());
}

TEST(RunSimulationTest, DifferentSeedsDiffer) {
  SimulationConfig c = SmallConfig();
  const SimulationResult a = run_simulation(c);
  c.seed = 43;
  const SimulationResult b = run_simulation(c);
  EXPECT_NE(a.chain.tip_hash(), b.chain.tip_hash());
}

TEST(RunSimulationTest, AggregateIsRecomputableFromLedgerAndArchive) {
  for (AggregationMode mode : {AggregationMode::kTrust, AggregationMode::kPlain}) {
    SimulationConfig c = SmallConfig();
    c.poisoned_nodes = {0, 4};
    c.aggregation = mode;
    const SimulationResult r = run_simulation(c);
    ASSERT_EQ(r.chain.height(), c.rounds);
    std::vector<double> reputation(c.node_count, 0.0);
    Digest previous = r.chain.blocks()[0].aggregate_digest;
    std::size_t rejected_seen = 0;
    for (std::size_t k = 1; k < r.chain.size(); ++k) {
      const Block& b = r.chain.blocks()[k];
      std::vector<WeightedContribution> contribs;
      for (const auto& rec : b.records) {
        const Bytes* stored = r.archive.find(rec.weights_digest);
        ASSERT_NE(stored, nullptr);
        const LocalUpdate u = decode_local_update(*stored);
        if (rec.accepted()) {
          reputation[rec.node_id] += c.contract.reputation_step;
        } else {
          ++rejected_seen;
        }
        contribs.push_back({rec.node_id, u.weights, u.sample_count, rec.accepted()});
      }
      const bool any = std::any_of(contribs.begin(), contribs.end(),
                                   [](const auto& x) { return x.accepted; });
      if (!any) {
        EXPECT_EQ(b.aggregate_digest, previous);
        continue;
      }
      const ModelWeights agg = mode == AggregationMode::kPlain
                                   ? fed_avg(contribs)
                                   : trust_weighted_avg(contribs, trust_weights(reputation));
      const ModelWeights broadcast(
          densify(encode_dense(agg.values), agg.dim()));
      EXPECT_EQ(weights_digest(broadcast), b.aggregate_digest) << "height " << k;
      previous = b.aggregate_digest;
    }
    EXPECT_GT(rejected_seen, 0u);
  }
}

TEST(RunSimulationTest, RecordsCoverTransmittingNodesAndBytesAddUp) {
  SimulationConfig c = SmallConfig();
  c.update_every = 3;
  c.sparsity_rho = 0.5;
  const SimulationResult r = run_simulation(c);
  const std::size_t dim = c.synthetic.feature_dim + 1;
  for (const auto& round : r.report.rounds) {
    const Block& b = r.chain.blocks()[round.round];
    std::size_t transmitted = 0, payload = 0;
    for (const auto& n : round.nodes) {
      transmitted += n.transmitted;
      payload += n.payload_bytes;
    }
    EXPECT_EQ(round.transmit_round, round.round % 3 == 0);
    EXPECT_EQ(b.records.size(), transmitted);
    EXPECT_EQ(round.uplink_messages, transmitted);
    EXPECT_EQ(round.uplink_bytes, payload);
    EXPECT_EQ(round.ledger_bytes, b.size_bytes);
    EXPECT_EQ(round.gas, gas_cost(b, c.gas_per_byte));
    if (round.transmit_round) {
      EXPECT_EQ(transmitted, c.node_count);
      EXPECT_EQ(round.uplink_bytes,
                c.node_count * (c.header_bytes + 8 * topk_count(dim, 0.5)));
      EXPECT_EQ(round.downlink_bytes, c.node_count * (c.header_bytes + 4 * dim));
    } else {
      EXPECT_EQ(round.uplink_bytes, 0u);
      EXPECT_EQ(round.downlink_bytes, 0u);
      EXPECT_EQ(b.size_bytes, kBlockHeaderBytes);
    }
  }
}

TEST(RunSimulationTest, AllRejectedKeepsPreviousGlobal) {
  SimulationConfig c = SmallConfig();
  c.contract.max_divergence = 1e-12;
  const SimulationResult r = run_simulation(c);
  for (const auto& round : r.report.rounds) {
    EXPECT_EQ(round.accepted, 0u);
    EXPECT_FALSE(round.aggregated);
    EXPECT_EQ(round.global_digest, weights_digest(ModelWeights::zeros(8)));
  }
  EXPECT_EQ(r.final_weights, ModelWeights::zeros(8));
  EXPECT_EQ(r.chain.height(), c.rounds);
}

TEST(RunSimulationTest, ConsensusFailureDropsBlocksButTrainingAdvances) {
  SimulationConfig c = SmallConfig();
  c.adversarial_fraction = 0.6;
  const SimulationResult r = run_simulation(c);
  EXPECT_EQ(r.chain.height(), 0u);
  EXPECT_EQ(r.report.committed_blocks, 0u);
  EXPECT_EQ(r.report.total_gas, 0.0);
  EXPECT_GT(r.report.final_metrics.accuracy, r.report.initial_metrics.accuracy);
  for (const auto& round : r.report.rounds) {
    EXPECT_FALSE(round.consensus.committed);
    EXPECT_EQ(round.consensus.approvals, 2u);
  }
}

TEST(RunSimulationTest, ReputationsNeverDecreaseAndRejectedEarnNothing) {
  SimulationConfig c = SmallConfig();
  c.poisoned_nodes = {1};
  const SimulationResult r = run_simulation(c);
  std::vector<double> prev(c.node_count, 0.0);
  for (const auto& round : r.report.rounds) {
    for (const auto& n : round.nodes) {
      EXPECT_GE(n.reputation, prev[n.node_id]);
      const bool accepted = n.transmitted && n.reason == VerdictReason::kOk;
      EXPECT_EQ(n.reputation - prev[n.node_id],
                accepted ? c.contract.reputation_step : 0.0);
      prev[n.node_id] = n.reputation;
    }
  }
}

TEST(RunSimulationTest, PoisonersAreRejectedUnderDefaults) {
  SimulationConfig c;
  c.rounds = 20;
  c.poisoned_nodes = {1, 3};
  const SimulationResult r = run_simulation(c);
  for (const auto& round : r.report.rounds) {
    for (const auto& n : round.nodes) {
      if (n.poisoner) EXPECT_FALSE(n.reason == VerdictReason::kOk) << round.round;
      else EXPECT_TRUE(n.reason == VerdictReason::kOk) << round.round;
    }
  }
}

TEST(RunSimulationTest, NodeCountMismatchThrows) {
  SimulationConfig c = SmallConfig();
  PreparedData d = prepare_data(c);
  d.nodes.pop_back();
  EXPECT_THROW(run_simulation(c, d), std::invalid_argument);
}

}  // namespace
}  // namespace fedledger
