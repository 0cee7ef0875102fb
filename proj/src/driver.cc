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

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>

#include "fedledger/aggregation.h"
#include "fedledger/transport.h"

namespace fedledger {

namespace {

// RNG stream ids derived from the run seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kTestSplitStream = 2;
constexpr std::uint64_t kPartitionStream = 3;
constexpr std::uint64_t kValidatorStream = 4;
constexpr std::uint64_t kNodeStreamBase = 1000;

struct NodeOutcome {
  ModelWeights trained;
  LocalUpdate submitted;
  double local_loss = 0.0;
};

// Quantizes to what a dense 32-bit broadcast carries.
ModelWeights OverTheWire(const ModelWeights& w, std::size_t header_bytes) {
  return ModelWeights(densify(encode_dense(w.values, header_bytes), w.dim()));
}

template <typename Fn>
void ParallelFor(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ClassificationMetrics compute_metrics(const ModelWeights& weights,
                                      const LabeledDataset& test,
                                      double threshold) {
  if (test.empty()) throw std::invalid_argument("compute_metrics: empty set");
  ClassificationMetrics m;
  for (std::size_t r = 0; r < test.rows(); ++r) {
    const bool predicted = predict(weights, test.row(r)) >= threshold;
    const bool actual = test.label(r) == 1;
    if (predicted && actual) ++m.true_positive;
    if (predicted && !actual) ++m.false_positive;
    if (!predicted && !actual) ++m.true_negative;
    if (!predicted && actual) ++m.false_negative;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(m.true_positive + m.true_negative, test.rows());
  m.precision = ratio(m.true_positive, m.true_positive + m.false_positive);
  m.recall = ratio(m.true_positive, m.true_positive + m.false_negative);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

LocalUpdate inject_poison(const LocalUpdate& update,
                          const ModelWeights& previous_global, double scale,
                          const NodeState& node, double threshold) {
  LocalUpdate poisoned = update;
  const RealVector delta =
      subtract(update.weights.values, previous_global.values);
  poisoned.weights = ModelWeights(axpy(previous_global.values, scale, delta));
  const LabeledDataset& eval = node.holdout.empty() ? node.train : node.holdout;
  poisoned.anomaly_score = anomaly_score(poisoned.weights, eval, threshold);
  poisoned.payload = encode_dense(poisoned.weights.values,
                                  update.payload.header_bytes);
  return poisoned;
}

PreparedData prepare_data(const SimulationConfig& config) {
  config.validate();
  LabeledDataset all;
  if (config.data_source == "synthetic") {
    RngState rng = seeded_rng(config.seed, kDataStream);
    all = generate_synthetic(config.synthetic, rng);
  } else {
    CsvOptions options;
    options.label_column = config.label_column;
    options.positive_labels = config.positive_labels;
    options.normalize = config.normalize;
    all = load_csv(config.data_source, options);
  }

  RngState split_rng = seeded_rng(config.seed, kTestSplitStream);
  auto [train, test] = train_test_split(all, config.test_fraction, split_rng);
  if (test.empty()) {
    throw ConfigError("data.test_fraction leaves an empty test split");
  }

  PartitionSpec spec;
  spec.node_count = config.node_count;
  spec.mode = config.partition_mode;
  spec.concentration = config.partition_concentration;
  spec.holdout_fraction = config.holdout_fraction;
  RngState part_rng = seeded_rng(config.seed, kPartitionStream);
  auto shards = partition(train, spec, part_rng);

  PreparedData data;
  data.test = std::move(test);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    NodeState node;
    node.node_id = static_cast<NodeId>(i);
    node.train = std::move(shards[i].train);
    node.holdout = std::move(shards[i].holdout);
    node.poisoner =
        std::find(config.poisoned_nodes.begin(), config.poisoned_nodes.end(),
                  node.node_id) != config.poisoned_nodes.end();
    data.nodes.push_back(std::move(node));
  }
  return data;
}

std::optional<std::uint64_t> rounds_to_convergence(
    const std::vector<RoundReport>& rounds, double target,
    std::size_t sustain) {
  std::size_t streak = 0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    streak = rounds[i].metrics.accuracy >= target ? streak + 1 : 0;
    if (streak == sustain) return rounds[i + 1 - sustain].round;
  }
  return std::nullopt;
}

SimulationResult run_simulation(const SimulationConfig& config) {
  return run_simulation(config, prepare_data(config));
}

SimulationResult run_simulation(const SimulationConfig& config,
                                const PreparedData& data) {
  config.validate();
  const std::size_t n = data.nodes.size();
  if (n != config.node_count) {
    throw std::invalid_argument("run_simulation: node count mismatch");
  }
  const std::size_t dim = data.test.dim() + 1;

  std::vector<RngState> node_rngs;
  node_rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    node_rngs.push_back(seeded_rng(config.seed, kNodeStreamBase + i));
  }
  RngState validator_rng = seeded_rng(config.seed, kValidatorStream);
  const ValidatorSet validators =
      make_validator_set(config.validator_count(), config.adversarial_fraction,
                         config.silent_fraction, validator_rng);

  ModelWeights global(RealVector(dim, 0.0));
  std::vector<ModelWeights> local_models(n, global);
  Chain chain(make_genesis(weights_digest(global), config.epoch));
  ReputationLedger reputations(n);
  UpdateArchive archive;

  SimulationReport report;
  report.initial_metrics =
      compute_metrics(global, data.test, config.train.threshold);
  for (const auto& node : data.nodes) {
    report.node_train_sizes.push_back(node.train.rows());
  }

  const bool sparse = config.sparsity_rho < 1.0;
  std::vector<NodeOutcome> outcomes(n);

  for (std::uint64_t t = 1; t <= config.rounds; ++t) {
    RoundReport round;
    round.round = t;
    round.transmit_round = t % config.update_every == 0;

    ParallelFor(n, config.threads, [&](std::size_t i) {
      const NodeState& node = data.nodes[i];
      LocalUpdate trained =
          local_training_round(node, local_models[i], config.train, config.dp,
                               node_rngs[i], t);
      NodeOutcome& out = outcomes[i];
      out.local_loss = local_loss(trained.weights, node.train);
      out.trained = trained.weights;
      out.submitted =
          node.poisoner && round.transmit_round
              ? inject_poison(trained, global, config.poison_scale, node,
                              config.train.threshold)
              : std::move(trained);
    });

    double loss_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      local_models[i] = outcomes[i].trained;
      loss_sum += outcomes[i].local_loss;
    }
    round.mean_local_loss = loss_sum / static_cast<double>(n);

    ModelWeights next_global = global;
    Block block;
    block.height = chain.height() + 1;
    block.prev_hash = chain.tip_hash();
    block.timestamp = t + config.epoch;

    std::vector<WeightedContribution> contribs;
    round.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      NodeRoundRecord& rec = round.nodes[i];
      rec.node_id = data.nodes[i].node_id;
      rec.poisoner = data.nodes[i].poisoner;
      rec.local_loss = outcomes[i].local_loss;
      rec.anomaly_score = outcomes[i].submitted.anomaly_score;
    }

    if (round.transmit_round) {
      for (std::size_t i = 0; i < n; ++i) {
        const LocalUpdate& sent = outcomes[i].submitted;
        LocalUpdate received = sent;
        if (sparse) {
          const RealVector delta =
              subtract(sent.weights.values, global.values);
          received.payload =
              sparsify_topk(delta, config.sparsity_rho, config.header_bytes);
          received.weights = ModelWeights(
              add(global.values, densify(received.payload, dim)));
        } else {
          received.payload =
              encode_dense(sent.weights.values, config.header_bytes);
          received.weights = ModelWeights(densify(received.payload, dim));
        }

        NodeRoundRecord& rec = round.nodes[i];
        rec.transmitted = true;
        rec.payload_bytes = payload_bytes(received.payload);
        rec.update_cost = update_cost(rec.payload_bytes,
                                      config.latency_of(rec.node_id),
                                      config.cost);
        round.uplink_bytes += rec.payload_bytes;
        ++round.uplink_messages;
        round.update_cost += rec.update_cost;

        const Verdict verdict =
            validate_update(received, global, config.contract);
        rec.reason = verdict.reason;
        rec.divergence = verdict.divergence;
        reputations.apply(rec.node_id, verdict,
                          config.contract.reputation_step);
        reputations.record(t, rec.node_id, verdict);
        if (verdict.accepted()) {
          ++round.accepted;
        } else {
          ++round.rejected;
        }

        LedgerRecord lr;
        lr.node_id = rec.node_id;
        lr.weights_digest = archive.put(received);
        lr.anomaly_score = received.anomaly_score;
        lr.reason = verdict.reason;
        lr.payload_bytes = rec.payload_bytes;
        block.records.push_back(lr);

        contribs.push_back({rec.node_id, received.weights,
                            received.sample_count, verdict.accepted()});
      }

      if (round.accepted > 0) {
        TrustVector trust;
        ModelWeights aggregate;
        if (config.aggregation == AggregationMode::kPlain) {
          aggregate = fed_avg(contribs);
          trust.values.assign(n, 0.0);
          double total = 0.0;
          for (const auto& c : contribs) {
            if (c.accepted) total += static_cast<double>(c.sample_count);
          }
          for (const auto& c : contribs) {
            if (c.accepted) {
              trust.values[c.node_id] =
                  static_cast<double>(c.sample_count) / total;
            }
          }
        } else {
          const auto& r = reputations.reputations();
          const bool any_positive =
              std::any_of(r.begin(), r.end(), [](double x) { return x > 0; });
          trust = any_positive ? trust_weights(r) : uniform_trust(n);
          aggregate = trust_weighted_avg(contribs, trust);
        }
        for (std::size_t i = 0; i < n; ++i) {
          round.nodes[i].trust = trust.values[i];
        }
        next_global = OverTheWire(aggregate, config.header_bytes);
        round.aggregated = true;
        round.downlink_bytes =
            n * payload_bytes(encode_dense(next_global.values,
                                           config.header_bytes));
      }
      // Every transmit round is a synchronization point.
      std::fill(local_models.begin(), local_models.end(), next_global);
    }
    for (std::size_t i = 0; i < n; ++i) {
      round.nodes[i].reputation = reputations.reputation(round.nodes[i].node_id);
    }

    block.aggregate_digest = weights_digest(next_global);
    finalize_block(block);
    if (block.size_bytes > config.block_size_cap) {
      throw std::runtime_error("round " + std::to_string(t) + ": block of " +
                               std::to_string(block.size_bytes) +
                               " bytes exceeds ledger.block_size_cap");
    }
    const Digest proposed = block_hash(block);
    round.consensus = run_consensus_round(validators, block, proposed,
                                          config.block_size_cap);
    round.ledger_bytes = block.size_bytes;
    if (round.consensus.committed) round.gas = gas_cost(block, config.gas_per_byte);
    append_block(chain, std::move(block), round.consensus);
    round.chain_height = chain.height();

    global = std::move(next_global);
    round.global_digest = weights_digest(global);
    round.metrics = compute_metrics(global, data.test, config.train.threshold);

    report.total_uplink_bytes += round.uplink_bytes;
    report.total_downlink_bytes += round.downlink_bytes;
    report.total_ledger_bytes += round.ledger_bytes;
    report.total_gas += round.gas;
    if (round.consensus.committed) ++report.committed_blocks;
    report.rounds.push_back(std::move(round));
  }

  report.final_metrics =
      report.rounds.empty() ? report.initial_metrics
                            : report.rounds.back().metrics;
  report.rounds_to_convergence =
      rounds_to_convergence(report.rounds, config.target_accuracy);

  std::vector<ValidatorBehavior> behaviors;
  for (const auto& v : validators.validators) behaviors.push_back(v.behavior);
  return SimulationResult{config,           std::move(report), std::move(chain),
                          std::move(archive), std::move(global),
                          std::move(behaviors)};
}

}  // namespace fedledger
