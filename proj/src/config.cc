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

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace fedledger {

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseReal(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || std::isnan(x)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v +
                      "'");
  }
  return x;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("config: '" + key +
                      "' expects a non-negative integer, got '" + v + "'");
  }
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError("config: '" + key + "' overflows");
  return x;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v +
                    "'");
}

std::string Real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string Uint(T x) {
  return std::to_string(x);
}

std::string Join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

struct KeySpec {
  const char* name;
  std::function<void(SimulationConfig&, const std::string&, const std::string&)>
      set;
  std::function<std::string(const SimulationConfig&)> get;
};

#define FL_REAL(field)                                                      \
  [](SimulationConfig& c, const std::string& k, const std::string& v) {     \
    c.field = ParseReal(k, v);                                              \
  },                                                                        \
      [](const SimulationConfig& c) { return Real(c.field); }
#define FL_UINT(field, type)                                                \
  [](SimulationConfig& c, const std::string& k, const std::string& v) {     \
    c.field = static_cast<type>(ParseUnsigned(k, v));                       \
  },                                                                        \
      [](const SimulationConfig& c) { return Uint(c.field); }

const std::vector<KeySpec>& KeyTable() {
  static const std::vector<KeySpec> table = {
      {"sim.nodes", FL_UINT(node_count, std::size_t)},
      {"sim.rounds", FL_UINT(rounds, std::size_t)},
      {"sim.seed", FL_UINT(seed, std::uint64_t)},
      {"sim.threads", FL_UINT(threads, std::size_t)},
      {"train.learning_rate", FL_REAL(train.learning_rate)},
      {"train.local_epochs", FL_UINT(train.local_epochs, std::size_t)},
      {"train.batch_size", FL_UINT(train.batch_size, std::size_t)},
      {"dp.clip_norm", FL_REAL(dp.clip_norm)},
      {"dp.noise_scale", FL_REAL(dp.noise_scale)},
      {"dp.noise_mode",
       [](SimulationConfig& c, const std::string& k, const std::string& v) {
         if (v == "step") {
           c.dp.mode = NoiseMode::kPerStep;
         } else if (v == "round") {
           c.dp.mode = NoiseMode::kPerRound;
         } else {
           throw ConfigError("config: '" + k + "' must be step or round");
         }
       },
       [](const SimulationConfig& c) {
         return std::string(c.dp.mode == NoiseMode::kPerStep ? "step"
                                                             : "round");
       }},
      {"contract.max_divergence", FL_REAL(contract.max_divergence)},
      {"contract.max_anomaly", FL_REAL(contract.max_anomaly)},
      {"contract.reputation_step", FL_REAL(contract.reputation_step)},
      {"aggregation.mode",
       [](SimulationConfig& c, const std::string& k, const std::string& v) {
         if (v == "plain") {
           c.aggregation = AggregationMode::kPlain;
         } else if (v == "trust") {
           c.aggregation = AggregationMode::kTrust;
         } else {
           throw ConfigError("config: '" + k + "' must be plain or trust");
         }
       },
       [](const SimulationConfig& c) {
         return std::string(c.aggregation == AggregationMode::kPlain ? "plain"
                                                                     : "trust");
       }},
      {"cost.alpha", FL_REAL(cost.alpha)},
      {"cost.beta", FL_REAL(cost.beta)},
      {"cost.latency", FL_REAL(default_latency)},
      {"ledger.gas_per_byte", FL_REAL(gas_per_byte)},
      {"ledger.block_size_cap", FL_UINT(block_size_cap, std::size_t)},
      {"ledger.epoch", FL_UINT(epoch, std::uint64_t)},
      {"consensus.validators", FL_UINT(validators, std::size_t)},
      {"consensus.adversarial_fraction", FL_REAL(adversarial_fraction)},
      {"consensus.silent_fraction", FL_REAL(silent_fraction)},
      {"transport.sparsity_rho", FL_REAL(sparsity_rho)},
      {"transport.update_every", FL_UINT(update_every, std::size_t)},
      {"transport.header_bytes", FL_UINT(header_bytes, std::size_t)},
      {"data.source",
       [](SimulationConfig& c, const std::string&, const std::string& v) {
         c.data_source = v;
       },
       [](const SimulationConfig& c) { return c.data_source; }},
      {"data.label_column",
       [](SimulationConfig& c, const std::string&, const std::string& v) {
         c.label_column = v;
       },
       [](const SimulationConfig& c) { return c.label_column; }},
      {"data.positive_labels",
       [](SimulationConfig& c, const std::string&, const std::string& v) {
         const auto items = SplitList(v);
         c.positive_labels = {items.begin(), items.end()};
       },
       [](const SimulationConfig& c) { return Join(c.positive_labels); }},
      {"data.normalize",
       [](SimulationConfig& c, const std::string& k, const std::string& v) {
         c.normalize = ParseBool(k, v);
       },
       [](const SimulationConfig& c) {
         return std::string(c.normalize ? "true" : "false");
       }},
      {"data.test_fraction", FL_REAL(test_fraction)},
      {"synthetic.samples", FL_UINT(synthetic.sample_count, std::size_t)},
      {"synthetic.feature_dim", FL_UINT(synthetic.feature_dim, std::size_t)},
      {"synthetic.class_balance", FL_REAL(synthetic.class_balance)},
      {"synthetic.margin", FL_REAL(synthetic.margin)},
      {"synthetic.noise_std", FL_REAL(synthetic.noise_std)},
      {"partition.mode",
       [](SimulationConfig& c, const std::string& k, const std::string& v) {
         if (v == "iid") {
           c.partition_mode = PartitionMode::kIid;
         } else if (v == "label_skew") {
           c.partition_mode = PartitionMode::kLabelSkew;
         } else {
           throw ConfigError("config: '" + k + "' must be iid or label_skew");
         }
       },
       [](const SimulationConfig& c) {
         return std::string(c.partition_mode == PartitionMode::kIid
                                ? "iid"
                                : "label_skew");
       }},
      {"partition.concentration", FL_REAL(partition_concentration)},
      {"partition.holdout_fraction", FL_REAL(holdout_fraction)},
      {"attack.poisoned_nodes",
       [](SimulationConfig& c, const std::string& k, const std::string& v) {
         c.poisoned_nodes.clear();
         for (const auto& item : SplitList(v)) {
           c.poisoned_nodes.push_back(
               static_cast<NodeId>(ParseUnsigned(k, item)));
         }
       },
       [](const SimulationConfig& c) {
         std::string out;
         for (NodeId id : c.poisoned_nodes) {
           if (!out.empty()) out += ',';
           out += std::to_string(id);
         }
         return out;
       }},
      {"attack.poison_scale", FL_REAL(poison_scale)},
      {"metrics.target_accuracy", FL_REAL(target_accuracy)},
      {"metrics.threshold", FL_REAL(train.threshold)},
  };
  return table;
}

#undef FL_REAL
#undef FL_UINT

constexpr const char* kLatencyPrefix = "cost.latency.";

}  // namespace

double SimulationConfig::latency_of(NodeId id) const {
  const auto it = latency.find(id);
  return it == latency.end() ? default_latency : it->second;
}

void SimulationConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(node_count >= 1, "sim.nodes must be >= 1");
  require(threads >= 1, "sim.threads must be >= 1");
  try {
    train.validate();
    dp.validate();
    contract.validate();
    synthetic.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(cost.alpha >= 0.0 && cost.beta >= 0.0, "cost.alpha/beta must be >= 0");
  require(default_latency >= 0.0, "cost.latency must be >= 0");
  for (const auto& [id, l] : latency) {
    require(id < node_count, "cost.latency." + std::to_string(id) +
                                 " names an unknown node");
    require(l >= 0.0, "cost.latency." + std::to_string(id) + " must be >= 0");
  }
  require(gas_per_byte > 0.0, "ledger.gas_per_byte must be > 0");
  require(block_size_cap >= kBlockHeaderBytes, "ledger.block_size_cap too small");
  require(adversarial_fraction >= 0.0 && adversarial_fraction <= 1.0,
          "consensus.adversarial_fraction must be in [0, 1]");
  require(silent_fraction >= 0.0 && silent_fraction <= 1.0,
          "consensus.silent_fraction must be in [0, 1]");
  require(adversarial_fraction + silent_fraction <= 1.0,
          "consensus fractions sum above 1");
  require(sparsity_rho > 0.0 && sparsity_rho <= 1.0,
          "transport.sparsity_rho must be in (0, 1]");
  require(update_every >= 1, "transport.update_every must be >= 1");
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "data.test_fraction must be in (0, 1)");
  require(holdout_fraction >= 0.0 && holdout_fraction < 1.0,
          "partition.holdout_fraction must be in [0, 1)");
  require(partition_mode == PartitionMode::kIid ||
              (partition_concentration > 0.0 &&
               std::isfinite(partition_concentration)),
          "partition.concentration must be > 0");
  for (NodeId id : poisoned_nodes) {
    require(id < node_count, "attack.poisoned_nodes names unknown node " +
                                 std::to_string(id));
  }
  require(std::isfinite(poison_scale), "attack.poison_scale must be finite");
  require(target_accuracy >= 0.0 && target_accuracy <= 1.0,
          "metrics.target_accuracy must be in [0, 1]");
}

void apply_setting(SimulationConfig& config, const std::string& key,
                   const std::string& value) {
  if (key.rfind(kLatencyPrefix, 0) == 0) {
    const std::string id = key.substr(std::string(kLatencyPrefix).size());
    config.latency[static_cast<NodeId>(ParseUnsigned(key, id))] =
        ParseReal(key, value);
    return;
  }
  for (const auto& spec : KeyTable()) {
    if (key == spec.name) {
      spec.set(config, key, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

SimulationConfig parse_config(const std::string& text, SimulationConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return base;
}

SimulationConfig load_config(const std::filesystem::path& path,
                             SimulationConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string format_config(const SimulationConfig& config) {
  std::string out;
  for (const auto& spec : KeyTable()) {
    out += spec.name;
    out += " = ";
    out += spec.get(config);
    out += '\n';
  }
  for (const auto& [id, l] : config.latency) {
    out += kLatencyPrefix + std::to_string(id) + " = " + Real(l) + '\n';
  }
  return out;
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys;
  for (const auto& spec : KeyTable()) keys.emplace_back(spec.name);
  keys.push_back(std::string(kLatencyPrefix) + "<node_id>");
  return keys;
}

}  // namespace fedledger
