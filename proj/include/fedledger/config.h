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

#ifndef FEDLEDGER_CONFIG_H_
#define FEDLEDGER_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedledger/aggregation.h"
#include "fedledger/contract.h"
#include "fedledger/data.h"
#include "fedledger/ledger.h"
#include "fedledger/model.h"
#include "fedledger/transport.h"

namespace fedledger {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every knob of a run. Defaults follow the reference deployment: 10 nodes,
// 50 rounds, learning rate 0.01, 3 local epochs, batch 64, noise scale 1.0,
// 2 MiB blocks, majority-vote consensus with every node validating.
struct SimulationConfig {
  std::size_t node_count = 10;
  std::size_t rounds = 50;
  std::uint64_t seed = 42;
  std::size_t threads = 1;

  TrainConfig train;
  DpConfig dp;
  ContractPolicy contract;
  AggregationMode aggregation = AggregationMode::kTrust;

  CostParams cost;
  double default_latency = 0.0;
  std::map<NodeId, double> latency;

  double gas_per_byte = 1.0;
  std::size_t block_size_cap = kDefaultBlockSizeCap;
  std::uint64_t epoch = 0;

  std::size_t validators = 0;  // 0 means one per node
  double adversarial_fraction = 0.0;
  double silent_fraction = 0.0;

  double sparsity_rho = 1.0;  // 1 sends dense weights; < 1 sparse deltas
  std::size_t update_every = 1;
  std::size_t header_bytes = kDefaultHeaderBytes;

  std::string data_source = "synthetic";
  std::string label_column = "label";
  std::set<std::string> positive_labels = {"1"};
  bool normalize = true;  // applies to CSV sources
  double test_fraction = 0.2;
  SyntheticSpec synthetic;
  PartitionMode partition_mode = PartitionMode::kIid;
  double partition_concentration = 1.0;
  double holdout_fraction = 0.2;

  std::vector<NodeId> poisoned_nodes;
  double poison_scale = -5.0;

  double target_accuracy = 0.95;

  std::size_t validator_count() const {
    return validators == 0 ? node_count : validators;
  }
  double latency_of(NodeId id) const;

  // Throws ConfigError naming the first invalid setting.
  void validate() const;
};

// Applies one `key = value` setting. Throws ConfigError for an unknown key or
// an unparsable value.
void apply_setting(SimulationConfig& config, const std::string& key,
                   const std::string& value);

// Flat `key = value` lines; `#` starts a comment; blank lines ignored.
SimulationConfig parse_config(const std::string& text,
                              SimulationConfig base = {});
SimulationConfig load_config(const std::filesystem::path& path,
                             SimulationConfig base = {});

// The effective configuration in the same format parse_config reads.
std::string format_config(const SimulationConfig& config);

std::vector<std::string> known_config_keys();

}  // namespace fedledger

#endif  // FEDLEDGER_CONFIG_H_
