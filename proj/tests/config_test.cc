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


#include "fedledger/config.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

namespace fedledger {
namespace {

TEST(ConfigDefaultsTest, MatchSimulationParameterTable) {
  const SimulationConfig c;
  EXPECT_EQ(c.node_count, 10u);
  EXPECT_EQ(c.rounds, 50u);
  EXPECT_EQ(c.train.learning_rate, 0.01);
  EXPECT_EQ(c.train.local_epochs, 3u);
  EXPECT_EQ(c.train.batch_size, 64u);
  EXPECT_EQ(c.dp.noise_scale, 1.0);
  EXPECT_EQ(c.dp.clip_norm, 1.0);
  EXPECT_EQ(c.block_size_cap, 2u * 1024 * 1024);
  EXPECT_EQ(c.validator_count(), 10u);
  EXPECT_EQ(c.aggregation, AggregationMode::kTrust);
  EXPECT_EQ(c.test_fraction, 0.2);
  EXPECT_EQ(c.target_accuracy, 0.95);
  EXPECT_NO_THROW(c.validate());
}

TEST(ParseConfigTest, ReadsKeysCommentsAndWhitespace) {
  const SimulationConfig c = parse_config(
      "# a comment\n"
      "sim.nodes = 4\n"
      "  sim.rounds=7   # trailing comment\n"
      "\n"
      "dp.noise_scale = 0\n"
      "dp.noise_mode = round\n"
      "aggregation.mode = plain\n"
      "attack.poisoned_nodes = 1, 3\n"
      "data.positive_labels = attack,ddos\n"
      "partition.mode = label_skew\n"
      "contract.max_divergence = inf\n"
      "cost.latency = 0.5\n"
      "cost.latency.2 = 1.5\n"
      "transport.sparsity_rho = 0.3\n");
  EXPECT_EQ(c.node_count, 4u);
  EXPECT_EQ(c.rounds, 7u);
  EXPECT_EQ(c.dp.noise_scale, 0.0);
  EXPECT_EQ(c.dp.mode, NoiseMode::kPerRound);
  EXPECT_EQ(c.aggregation, AggregationMode::kPlain);
  EXPECT_EQ(c.poisoned_nodes, (std::vector<NodeId>{1, 3}));
  EXPECT_EQ(c.positive_labels, (std::set<std::string>{"attack", "ddos"}));
  EXPECT_EQ(c.partition_mode, PartitionMode::kLabelSkew);
  EXPECT_TRUE(std::isinf(c.contract.max_divergence));
  EXPECT_EQ(c.latency_of(0), 0.5);
  EXPECT_EQ(c.latency_of(2), 1.5);
  EXPECT_EQ(c.sparsity_rho, 0.3);
  EXPECT_NO_THROW(c.validate());
}

TEST(ParseConfigTest, UnknownKeyIsNamedError) {
  try {
    parse_config("sim.nodes = 3\nsim.nodez = 4\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sim.nodez"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
  }
}

TEST(ParseConfigTest, BadValuesAreErrors) {
  EXPECT_THROW(parse_config("sim.nodes = ten"), ConfigError);
  EXPECT_THROW(parse_config("sim.nodes = -1"), ConfigError);
  EXPECT_THROW(parse_config("dp.noise_scale = 1.0x"), ConfigError);
  EXPECT_THROW(parse_config("dp.noise_mode = sometimes"), ConfigError);
  EXPECT_THROW(parse_config("data.normalize = maybe"), ConfigError);
  EXPECT_THROW(parse_config("just some words"), ConfigError);
}

TEST(ValidateConfigTest, RejectsInconsistentSettings) {
  SimulationConfig c;
  c.poisoned_nodes = {10};
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.sparsity_rho = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.train.local_epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.adversarial_fraction = 0.6;
  c.silent_fraction = 0.6;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.latency[12] = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(FormatConfigTest, RoundTripsThroughParse) {
  SimulationConfig c = parse_config(
      "sim.nodes = 6\nsim.seed = 123456789012\ndp.clip_norm = 0.1\n"
      "train.learning_rate = 0.003\nattack.poisoned_nodes = 0,5\n"
      "cost.latency.4 = 0.25\nsynthetic.margin = 0.75\n");
  const std::string text = format_config(c);
  const SimulationConfig back = parse_config(text);
  EXPECT_EQ(format_config(back), text);
  EXPECT_EQ(back.seed, 123456789012u);
  EXPECT_EQ(back.train.learning_rate, 0.003);
}

TEST(FormatConfigTest, ListsEveryKnownKey) {
  const std::string text = format_config(SimulationConfig{});
  for (const auto& key : known_config_keys()) {
    if (key.find('<') != std::string::npos) continue;  // per-node pattern
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace fedledger
