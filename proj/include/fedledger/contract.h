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

// Update-validation rules and the reputation book they feed.

#ifndef FEDLEDGER_CONTRACT_H_
#define FEDLEDGER_CONTRACT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fedledger/model.h"

namespace fedledger {

struct ContractPolicy {
  double max_divergence = 0.6;
  double max_anomaly = 0.5;
  double reputation_step = 1.0;

  void validate() const;
};

enum class VerdictReason : std::uint8_t {
  kOk = 0,
  kDivergenceExceeded = 1,
  kAnomalyExceeded = 2,
  kMalformed = 3,
};

std::string_view to_string(VerdictReason reason);
std::optional<VerdictReason> reason_from_code(std::uint8_t code);

struct Verdict {
  VerdictReason reason = VerdictReason::kMalformed;
  double divergence = 0.0;  // NaN when the update is malformed

  bool accepted() const { return reason == VerdictReason::kOk; }
  int decision() const { return accepted() ? 1 : 0; }

  static Verdict ok(double divergence) {
    return Verdict{VerdictReason::kOk, divergence};
  }
};

// Accepts iff every weight is finite, the dimension matches, the divergence
// from `reference_global` is <= max_divergence, and the anomaly score is in
// [0, max_anomaly]. Checks run in that order; the first failure names the
// reason. Never throws.
Verdict validate_update(const LocalUpdate& update,
                        const ModelWeights& reference_global,
                        const ContractPolicy& policy);

// Per-node reputations R_i, all starting at 0, plus the verdict history.
class ReputationLedger {
 public:
  explicit ReputationLedger(std::size_t node_count = 0)
      : reputations_(node_count, 0.0) {}

  std::size_t node_count() const { return reputations_.size(); }
  double reputation(NodeId id) const;
  const std::vector<double>& reputations() const { return reputations_; }

  // R_i += step when the verdict accepts. Throws std::out_of_range for an
  // unknown node and std::invalid_argument for step <= 0.
  void apply(NodeId id, const Verdict& verdict, double step);

  struct Entry {
    std::uint64_t round;
    NodeId node_id;
    VerdictReason reason;
  };
  const std::vector<Entry>& history() const { return history_; }
  void record(std::uint64_t round, NodeId id, const Verdict& verdict) {
    history_.push_back({round, id, verdict.reason});
  }

 private:
  std::vector<double> reputations_;
  std::vector<Entry> history_;
};

// Value-returning form of ReputationLedger::apply.
ReputationLedger update_reputation(ReputationLedger ledger, NodeId id,
                                   const Verdict& verdict, double step);

}  // namespace fedledger

#endif  // FEDLEDGER_CONTRACT_H_
