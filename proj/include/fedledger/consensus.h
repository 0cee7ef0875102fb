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

// Single-phase majority vote standing in for PBFT: pre-prepare, prepare and
// commit are collapsed into one synchronous ballot per block.

#ifndef FEDLEDGER_CONSENSUS_H_
#define FEDLEDGER_CONSENSUS_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fedledger/ledger.h"
#include "fedledger/numerics.h"

namespace fedledger {

enum class ValidatorBehavior : std::uint8_t { kHonest, kSilent, kAdversarial };

enum class Vote : std::uint8_t { kApprove, kReject, kAbstain };

std::string_view to_string(ValidatorBehavior behavior);
std::string_view to_string(Vote vote);

struct Validator {
  std::uint32_t id = 0;
  ValidatorBehavior behavior = ValidatorBehavior::kHonest;
};

struct ValidatorSet {
  std::vector<Validator> validators;

  std::size_t size() const { return validators.size(); }
  std::size_t honest_count() const;
};

// floor(fraction * count) adversarial and silent validators, placed by a
// seeded shuffle; the rest are honest. Throws if count == 0 or the fractions
// are outside [0, 1] or sum above 1.
ValidatorSet make_validator_set(std::size_t count, double adversarial_fraction,
                                double silent_fraction, RngState& rng);

// Honest: approve iff block_hash(block) == expected_hash and the block
// invariants hold. Silent: abstain. Adversarial: reject a valid block,
// approve anything else.
Vote validator_vote(const Validator& validator, const Block& block,
                    const Digest& expected_hash,
                    std::size_t size_cap = kDefaultBlockSizeCap);

struct ConsensusResult {
  std::size_t approvals = 0;
  std::size_t total = 0;
  bool committed = false;
  std::vector<Vote> votes;  // ascending validator id
};

// Strict majority: committed iff 2 * approvals > total. Abstentions count
// against.
bool strict_majority(std::size_t approvals, std::size_t total);

ConsensusResult run_consensus_round(const ValidatorSet& validators,
                                    const Block& block,
                                    const Digest& expected_hash,
                                    std::size_t size_cap = kDefaultBlockSizeCap);

}  // namespace fedledger

#endif  // FEDLEDGER_CONSENSUS_H_
