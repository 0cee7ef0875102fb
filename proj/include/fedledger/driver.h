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

// Round loop of the federated-learning-on-a-ledger simulation.
//
// Each round t = 1..T:
//   1. every node trains locally (in parallel when sim.threads > 1) from the
//      last global model it received;
//   2. on transmit rounds (t % transport.update_every == 0) nodes send their
//      weights, poisoners after inject_poison, either dense or as a top-k
//      sparse delta against the current global;
//   3. the contract validates every received update against the current
//      global and reputations are credited;
//   4. accepted updates are aggregated (plain or trust weighted); with none
//      accepted the global model carries forward;
//   5. a block with one record per transmitting node and the new global's
//      digest is voted on and appended if a strict majority approves;
//   6. the global model is evaluated on a test split held out before
//      partitioning.
// Non-transmit rounds still append an empty block so the chain advances one
// block per committed round.

#ifndef FEDLEDGER_DRIVER_H_
#define FEDLEDGER_DRIVER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fedledger/config.h"
#include "fedledger/consensus.h"
#include "fedledger/ledger.h"
#include "fedledger/model.h"

namespace fedledger {

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;
};

// Confusion-matrix metrics with p >= threshold classified as attack.
// Precision, recall, and F1 are 0 when their denominator is 0. Throws on an
// empty test set.
ClassificationMetrics compute_metrics(const ModelWeights& weights,
                                      const LabeledDataset& test,
                                      double threshold = kDefaultThreshold);

// Moves the update to previous_global + scale * (w - previous_global) and
// rescores it on the poisoner's holdout (train split if the holdout is
// empty).
LocalUpdate inject_poison(const LocalUpdate& update,
                          const ModelWeights& previous_global, double scale,
                          const NodeState& node,
                          double threshold = kDefaultThreshold);

struct PreparedData {
  LabeledDataset test;
  std::vector<NodeState> nodes;
};

// Loads or generates the dataset, holds out the global test split, and
// partitions the rest across nodes, all from config.seed.
PreparedData prepare_data(const SimulationConfig& config);

struct NodeRoundRecord {
  NodeId node_id = 0;
  bool transmitted = false;
  bool poisoner = false;
  VerdictReason reason = VerdictReason::kOk;
  double divergence = 0.0;
  double anomaly_score = 0.0;
  double local_loss = 0.0;
  double reputation = 0.0;  // after this round's credit
  double trust = 0.0;       // aggregation weight share, 0 if not aggregated
  std::size_t payload_bytes = 0;
  double update_cost = 0.0;
};

struct RoundReport {
  std::uint64_t round = 0;
  ClassificationMetrics metrics;
  double mean_local_loss = 0.0;
  std::size_t uplink_bytes = 0;
  std::size_t uplink_messages = 0;
  std::size_t downlink_bytes = 0;
  std::size_t ledger_bytes = 0;  // proposed block size
  double gas = 0.0;              // charged only when the block commits
  double update_cost = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool transmit_round = false;
  bool aggregated = false;
  ConsensusResult consensus;
  std::uint64_t chain_height = 0;
  Digest global_digest{};
  std::vector<NodeRoundRecord> nodes;
};

struct SimulationReport {
  std::vector<RoundReport> rounds;
  ClassificationMetrics initial_metrics;
  ClassificationMetrics final_metrics;
  // First round whose accuracy reaches the target and stays there for three
  // consecutive rounds.
  std::optional<std::uint64_t> rounds_to_convergence;
  std::vector<std::size_t> node_train_sizes;
  std::size_t total_uplink_bytes = 0;
  std::size_t total_downlink_bytes = 0;
  std::size_t total_ledger_bytes = 0;
  double total_gas = 0.0;
  std::size_t committed_blocks = 0;
};

struct SimulationResult {
  SimulationConfig config;
  SimulationReport report;
  Chain chain;
  UpdateArchive archive;
  ModelWeights final_weights;
  std::vector<ValidatorBehavior> validator_behaviors;
};

SimulationResult run_simulation(const SimulationConfig& config);
SimulationResult run_simulation(const SimulationConfig& config,
                                const PreparedData& data);

std::optional<std::uint64_t> rounds_to_convergence(
    const std::vector<RoundReport>& rounds, double target,
    std::size_t sustain = 3);

}  // namespace fedledger

#endif  // FEDLEDGER_DRIVER_H_
