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

// Hash-chained round ledger.
//
// Canonical block encoding, version 1. Integers are big-endian, reals are the
// big-endian bytes of their IEEE-754 binary64 pattern:
//
//   u8   version (= 1)
//   u64  height
//   [32] prev_hash
//   u64  timestamp
//   [32] aggregate_digest
//   u64  size_bytes          (length of this whole encoding)
//   u32  record count
//   per record, ascending node id:
//     u32  node_id
//     [32] weights_digest
//     f64  anomaly_score
//     u8   decision (1 accept, 0 reject)
//     u8   reason code
//     u64  payload_bytes
//
// Model weights are encoded as u8 version, u32 dim, dim x f64; a weights
// digest is the SHA-256 of that encoding. Full updates live off-chain in an
// UpdateArchive keyed by weights digest.

#ifndef FEDLEDGER_LEDGER_H_
#define FEDLEDGER_LEDGER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedledger/contract.h"
#include "fedledger/model.h"
#include "fedledger/sha256.h"

namespace fedledger {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kEncodingVersion = 1;
inline constexpr std::size_t kBlockHeaderBytes = 1 + 8 + 32 + 8 + 32 + 8 + 4;
inline constexpr std::size_t kRecordBytes = 4 + 32 + 8 + 1 + 1 + 8;
inline constexpr std::size_t kDefaultBlockSizeCap = 2 * 1024 * 1024;

// Raised when bytes or export text do not parse as a valid encoding.
class LedgerFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Bytes encode_weights(const ModelWeights& weights);
ModelWeights decode_weights(std::span<const std::uint8_t> bytes);
Digest weights_digest(const ModelWeights& weights);

// u8 version, u32 node_id, u64 round, f64 anomaly, u64 sample_count, weights.
Bytes encode_local_update(const LocalUpdate& update);
LocalUpdate decode_local_update(std::span<const std::uint8_t> bytes);

struct LedgerRecord {
  NodeId node_id = 0;
  Digest weights_digest{};
  double anomaly_score = 0.0;
  VerdictReason reason = VerdictReason::kMalformed;
  std::uint64_t payload_bytes = 0;

  bool accepted() const { return reason == VerdictReason::kOk; }
};

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  std::uint64_t timestamp = 0;
  std::vector<LedgerRecord> records;
  Digest aggregate_digest{};
  std::uint64_t size_bytes = 0;
};

std::size_t encoded_size(const Block& block);

// Sorts records by node id and sets size_bytes to the encoded length.
void finalize_block(Block& block);

Bytes canonical_encode(const Block& block);
// Throws LedgerFormatError on truncated, oversized, or inconsistent input.
Block decode_block(std::span<const std::uint8_t> bytes);

Digest block_hash(const Block& block);

// gamma * size_bytes.
double gas_cost(const Block& block, double gas_per_byte);

// Structural checks shared by validators and chain verification: size field
// matches the encoding, size within cap, records strictly ascending by node,
// anomaly scores in [0, 1]. Returns the first violation.
std::optional<std::string> check_block_invariants(
    const Block& block, std::size_t size_cap = kDefaultBlockSizeCap);

Block make_genesis(const Digest& aggregate_digest, std::uint64_t epoch);

struct ConsensusResult;

// Append-only chain starting at a genesis block. Stores each block's hash as
// computed when it was appended.
class Chain {
 public:
  explicit Chain(Block genesis);

  // Rebuilds a chain from exported parts without any checking; use
  // verify_chain afterwards.
  static Chain from_parts(std::vector<Block> blocks,
                          std::vector<Digest> hashes);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Digest>& hashes() const { return hashes_; }
  const Block& tip() const { return blocks_.back(); }
  const Digest& tip_hash() const { return hashes_.back(); }
  std::uint64_t height() const { return blocks_.back().height; }
  std::size_t size() const { return blocks_.size(); }

  // Appends when `committed`. Throws std::logic_error if the block does not
  // extend the tip (height or prev_hash mismatch).
  bool append(Block block, bool committed);

  // Direct access for fault-injection tests.
  Block& mutable_block(std::size_t index) { return blocks_.at(index); }

 private:
  Chain() = default;

  std::vector<Block> blocks_;
  std::vector<Digest> hashes_;
};

// Appends iff consensus committed; returns whether the chain grew.
bool append_block(Chain& chain, Block block, const ConsensusResult& consensus);

// Content-addressed store of full local updates, keyed by weights digest.
class UpdateArchive {
 public:
  // Returns the key. An existing entry under the same key is kept.
  Digest put(const LocalUpdate& update);
  const Bytes* find(const Digest& key) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<Digest, Bytes>& entries() const { return entries_; }

  // One file per entry, named by the hex key.
  void save(const std::filesystem::path& dir) const;
  static UpdateArchive load(const std::filesystem::path& dir);

 private:
  std::map<Digest, Bytes> entries_;
};

struct ChainVerification {
  bool valid = true;
  std::uint64_t height = 0;  // first failing height when !valid
  std::string cause;
};

// Walks the chain from genesis. At each height, in order: height sequence,
// block invariants, stored hash vs recomputed hash, archived weights (when an
// archive is given), then the prev_hash link. Reports the first failure.
ChainVerification verify_chain(const Chain& chain,
                               const UpdateArchive* archive = nullptr,
                               std::size_t size_cap = kDefaultBlockSizeCap);

// Line-oriented export, one block per line:
//   v=1 height=H prev=HEX ts=T agg=HEX size=S n=K
//       [r=NODE:DIGEST:ANOMALY:DECISION:REASON:PAYLOAD]... hash=HEX
// ANOMALY is a C99 hex-float literal so the value round-trips exactly.
std::string format_export_line(const Block& block, const Digest& hash);
void write_ledger_export(const Chain& chain, const std::filesystem::path& path);
Chain read_ledger_export(const std::filesystem::path& path);

}  // namespace fedledger

#endif  // FEDLEDGER_LEDGER_H_
