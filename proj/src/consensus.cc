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

#include "fedledger/consensus.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedledger {

std::string_view to_string(ValidatorBehavior behavior) {
  switch (behavior) {
    case ValidatorBehavior::kHonest:
      return "honest";
    case ValidatorBehavior::kSilent:
      return "silent";
    case ValidatorBehavior::kAdversarial:
      return "adversarial";
  }
  return "unknown";
}

std::string_view to_string(Vote vote) {
  switch (vote) {
    case Vote::kApprove:
      return "approve";
    case Vote::kReject:
      return "reject";
    case Vote::kAbstain:
      return "abstain";
  }
  return "unknown";
}

std::size_t ValidatorSet::honest_count() const {
  return static_cast<std::size_t>(
      std::count_if(validators.begin(), validators.end(), [](const auto& v) {
        return v.behavior == ValidatorBehavior::kHonest;
      }));
}

ValidatorSet make_validator_set(std::size_t count, double adversarial_fraction,
                                double silent_fraction, RngState& rng) {
  if (count == 0) throw std::invalid_argument("consensus: no validators");
  if (!(adversarial_fraction >= 0.0 && adversarial_fraction <= 1.0) ||
      !(silent_fraction >= 0.0 && silent_fraction <= 1.0) ||
      adversarial_fraction + silent_fraction > 1.0) {
    throw std::invalid_argument("consensus: invalid behavior fractions");
  }
  const double n = static_cast<double>(count);
  const auto adversarial =
      static_cast<std::size_t>(std::floor(adversarial_fraction * n));
  const auto silent = static_cast<std::size_t>(std::floor(silent_fraction * n));

  std::vector<ValidatorBehavior> behaviors(count, ValidatorBehavior::kHonest);
  std::fill_n(behaviors.begin(), adversarial, ValidatorBehavior::kAdversarial);
  std::fill_n(behaviors.begin() + static_cast<std::ptrdiff_t>(adversarial),
              silent, ValidatorBehavior::kSilent);
  shuffle_in_place(std::span(behaviors), rng);

  ValidatorSet set;
  for (std::size_t i = 0; i < count; ++i) {
    set.validators.push_back({static_cast<std::uint32_t>(i), behaviors[i]});
  }
  return set;
}

Vote validator_vote(const Validator& validator, const Block& block,
                    const Digest& expected_hash, std::size_t size_cap) {
  if (validator.behavior == ValidatorBehavior::kSilent) return Vote::kAbstain;
  const bool valid = !check_block_invariants(block, size_cap).has_value() &&
                     block_hash(block) == expected_hash;
  if (validator.behavior == ValidatorBehavior::kAdversarial) {
    return valid ? Vote::kReject : Vote::kApprove;
  }
  return valid ? Vote::kApprove : Vote::kReject;
}

bool strict_majority(std::size_t approvals, std::size_t total) {
  return 2 * approvals > total;
}

ConsensusResult run_consensus_round(const ValidatorSet& validators,
                                    const Block& block,
                                    const Digest& expected_hash,
                                    std::size_t size_cap) {
  std::vector<const Validator*> order;
  for (const auto& v : validators.validators) order.push_back(&v);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  ConsensusResult result;
  result.total = order.size();
  for (const auto* v : order) {
    const Vote vote = validator_vote(*v, block, expected_hash, size_cap);
    if (vote == Vote::kApprove) ++result.approvals;
    result.votes.push_back(vote);
  }
  result.committed = strict_majority(result.approvals, result.total);
  return result;
}

}  // namespace fedledger
