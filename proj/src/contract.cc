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

#include "fedledger/contract.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fedledger/aggregation.h"

namespace fedledger {

void ContractPolicy::validate() const {
  if (!(max_divergence > 0.0)) {
    throw std::invalid_argument("contract: max_divergence must be > 0");
  }
  if (!(max_anomaly > 0.0 && max_anomaly <= 1.0)) {
    throw std::invalid_argument("contract: max_anomaly must be in (0, 1]");
  }
  if (!(reputation_step > 0.0) || !std::isfinite(reputation_step)) {
    throw std::invalid_argument("contract: reputation_step must be > 0");
  }
}

std::string_view to_string(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::kOk:
      return "ok";
    case VerdictReason::kDivergenceExceeded:
      return "divergence_exceeded";
    case VerdictReason::kAnomalyExceeded:
      return "anomaly_exceeded";
    case VerdictReason::kMalformed:
      return "malformed";
  }
  return "unknown";
}

std::optional<VerdictReason> reason_from_code(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(VerdictReason::kMalformed)) {
    return std::nullopt;
  }
  return static_cast<VerdictReason>(code);
}

Verdict validate_update(const LocalUpdate& update,
                        const ModelWeights& reference_global,
                        const ContractPolicy& policy) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (update.weights.dim() != reference_global.dim() ||
      !update.weights.values.all_finite() ||
      !(update.anomaly_score >= 0.0 && update.anomaly_score <= 1.0)) {
    return Verdict{VerdictReason::kMalformed, kNaN};
  }
  const double d = divergence(update.weights, reference_global);
  if (!std::isfinite(d)) return Verdict{VerdictReason::kMalformed, kNaN};
  if (d > policy.max_divergence) {
    return Verdict{VerdictReason::kDivergenceExceeded, d};
  }
  if (update.anomaly_score > policy.max_anomaly) {
    return Verdict{VerdictReason::kAnomalyExceeded, d};
  }
  return Verdict::ok(d);
}

double ReputationLedger::reputation(NodeId id) const {
  if (id >= reputations_.size()) {
    throw std::out_of_range("reputation: unknown node " + std::to_string(id));
  }
  return reputations_[id];
}

void ReputationLedger::apply(NodeId id, const Verdict& verdict, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("update_reputation: step must be > 0");
  }
  if (id >= reputations_.size()) {
    throw std::out_of_range("update_reputation: unknown node " +
                            std::to_string(id));
  }
  if (verdict.accepted()) reputations_[id] += step;
}

ReputationLedger update_reputation(ReputationLedger ledger, NodeId id,
                                   const Verdict& verdict, double step) {
  ledger.apply(id, verdict, step);
  return ledger;
}

}  // namespace fedledger
