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

#include "fedledger/ledger.h"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fedledger/consensus.h"

namespace fedledger {

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { Put(v, 4); }
  void u64(std::uint64_t v) { Put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void digest(const Digest& d) { out_.insert(out_.end(), d.begin(), d.end()); }
  Bytes take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  void Put(std::uint64_t v, int width) {
    for (int shift = 8 * (width - 1); shift >= 0; shift -= 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(Get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(Get(4)); }
  std::uint64_t u64() { return Get(8); }
  double f64() { return std::bit_cast<double>(Get(8)); }
  Digest digest() {
    Need(32);
    Digest d;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), 32,
                d.begin());
    pos_ += 32;
    return d;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void Need(std::size_t n) {
    if (remaining() < n) throw LedgerFormatError("encoding truncated");
  }
  std::uint64_t Get(int width) {
    Need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = v << 8 | in_[pos_++];
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void WriteWeights(ByteWriter& w, const ModelWeights& weights) {
  w.u8(kEncodingVersion);
  w.u32(static_cast<std::uint32_t>(weights.dim()));
  for (double v : weights.values) w.f64(v);
}

ModelWeights ReadWeights(ByteReader& r) {
  if (r.u8() != kEncodingVersion) {
    throw LedgerFormatError("weights: unsupported encoding version");
  }
  const std::uint32_t dim = r.u32();
  if (r.remaining() < static_cast<std::size_t>(dim) * 8) {
    throw LedgerFormatError("weights: encoding truncated");
  }
  RealVector values(dim);
  for (std::uint32_t i = 0; i < dim; ++i) values[i] = r.f64();
  return ModelWeights(std::move(values));
}

void ExpectEnd(const ByteReader& r, const char* what) {
  if (r.remaining() != 0) {
    throw LedgerFormatError(std::string(what) + ": trailing bytes");
  }
}

std::string FormatHexFloat(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::uint64_t ParseU64(const std::string& s, const char* field) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw LedgerFormatError(std::string("export: bad integer in '") + field +
                            "': '" + s + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno != 0) {
    throw LedgerFormatError(std::string("export: integer overflow in ") +
                            field);
  }
  return v;
}

Digest ParseDigest(const std::string& s, const char* field) {
  const auto d = digest_from_hex(s);
  if (!d) {
    throw LedgerFormatError(std::string("export: bad digest in '") + field +
                            "'");
  }
  return *d;
}

}  // namespace

Bytes encode_weights(const ModelWeights& weights) {
  ByteWriter w;
  w.reserve(5 + 8 * weights.dim());
  WriteWeights(w, weights);
  return w.take();
}

ModelWeights decode_weights(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ModelWeights weights = ReadWeights(r);
  ExpectEnd(r, "weights");
  return weights;
}

Digest weights_digest(const ModelWeights& weights) {
  return sha256(encode_weights(weights));
}

Bytes encode_local_update(const LocalUpdate& update) {
  ByteWriter w;
  w.u8(kEncodingVersion);
  w.u32(update.node_id);
  w.u64(update.round_index);
  w.f64(update.anomaly_score);
  w.u64(update.sample_count);
  WriteWeights(w, update.weights);
  return w.take();
}

LocalUpdate decode_local_update(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != kEncodingVersion) {
    throw LedgerFormatError("update: unsupported encoding version");
  }
  LocalUpdate u;
  u.node_id = r.u32();
  u.round_index = r.u64();
  u.anomaly_score = r.f64();
  u.sample_count = r.u64();
  u.weights = ReadWeights(r);
  ExpectEnd(r, "update");
  u.payload = encode_dense(u.weights.values);
  return u;
}

std::size_t encoded_size(const Block& block) {
  return kBlockHeaderBytes + kRecordBytes * block.records.size();
}

void finalize_block(Block& block) {
  std::stable_sort(block.records.begin(), block.records.end(),
                   [](const LedgerRecord& a, const LedgerRecord& b) {
                     return a.node_id < b.node_id;
                   });
  block.size_bytes = encoded_size(block);
}

Bytes canonical_encode(const Block& block) {
  ByteWriter w;
  w.reserve(encoded_size(block));
  w.u8(kEncodingVersion);
  w.u64(block.height);
  w.digest(block.prev_hash);
  w.u64(block.timestamp);
  w.digest(block.aggregate_digest);
  w.u64(block.size_bytes);
  w.u32(static_cast<std::uint32_t>(block.records.size()));
  for (const auto& rec : block.records) {
    w.u32(rec.node_id);
    w.digest(rec.weights_digest);
    w.f64(rec.anomaly_score);
    w.u8(rec.accepted() ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(rec.reason));
    w.u64(rec.payload_bytes);
  }
  return w.take();
}

Block decode_block(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u8() != kEncodingVersion) {
    throw LedgerFormatError("block: unsupported encoding version");
  }
  Block b;
  b.height = r.u64();
  b.prev_hash = r.digest();
  b.timestamp = r.u64();
  b.aggregate_digest = r.digest();
  b.size_bytes = r.u64();
  const std::uint32_t count = r.u32();
  if (r.remaining() != static_cast<std::size_t>(count) * kRecordBytes) {
    throw LedgerFormatError("block: record count disagrees with length");
  }
  b.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LedgerRecord rec;
    rec.node_id = r.u32();
    rec.weights_digest = r.digest();
    rec.anomaly_score = r.f64();
    const std::uint8_t decision = r.u8();
    const auto reason = reason_from_code(r.u8());
    if (!reason || decision > 1 ||
        (decision == 1) != (*reason == VerdictReason::kOk)) {
      throw LedgerFormatError("block: inconsistent verdict in record " +
                              std::to_string(i));
    }
    rec.reason = *reason;
    rec.payload_bytes = r.u64();
    b.records.push_back(rec);
  }
  ExpectEnd(r, "block");
  return b;
}

Digest block_hash(const Block& block) {
  return sha256(canonical_encode(block));
}

double gas_cost(const Block& block, double gas_per_byte) {
  return gas_per_byte * static_cast<double>(block.size_bytes);
}

std::optional<std::string> check_block_invariants(const Block& block,
                                                  std::size_t size_cap) {
  if (block.size_bytes != encoded_size(block)) {
    return "size_bytes " + std::to_string(block.size_bytes) +
           " != encoded length " + std::to_string(encoded_size(block));
  }
  if (block.size_bytes > size_cap) {
    return "block size " + std::to_string(block.size_bytes) +
           " exceeds cap " + std::to_string(size_cap);
  }
  for (std::size_t i = 0; i < block.records.size(); ++i) {
    const auto& rec = block.records[i];
    if (i > 0 && block.records[i - 1].node_id >= rec.node_id) {
      return "records not strictly ascending by node id";
    }
    if (!(rec.anomaly_score >= 0.0 && rec.anomaly_score <= 1.0)) {
      return "record for node " + std::to_string(rec.node_id) +
             " has anomaly score outside [0, 1]";
    }
  }
  return std::nullopt;
}

Block make_genesis(const Digest& aggregate_digest, std::uint64_t epoch) {
  Block g;
  g.height = 0;
  g.prev_hash = kZeroDigest;
  g.timestamp = epoch;
  g.aggregate_digest = aggregate_digest;
  finalize_block(g);
  return g;
}

Chain::Chain(Block genesis) {
  if (genesis.height != 0 || genesis.prev_hash != kZeroDigest) {
    throw std::logic_error("Chain: genesis must have height 0, zero prev");
  }
  hashes_.push_back(block_hash(genesis));
  blocks_.push_back(std::move(genesis));
}

Chain Chain::from_parts(std::vector<Block> blocks, std::vector<Digest> hashes) {
  if (blocks.empty() || blocks.size() != hashes.size()) {
    throw LedgerFormatError("chain: needs one hash per block, at least one");
  }
  Chain c;
  c.blocks_ = std::move(blocks);
  c.hashes_ = std::move(hashes);
  return c;
}

bool Chain::append(Block block, bool committed) {
  if (block.height != height() + 1) {
    throw std::logic_error("append_block: height " +
                           std::to_string(block.height) + " does not follow " +
                           std::to_string(height()));
  }
  if (block.prev_hash != tip_hash()) {
    throw std::logic_error("append_block: prev_hash does not match tip");
  }
  if (!committed) return false;
  hashes_.push_back(block_hash(block));
  blocks_.push_back(std::move(block));
  return true;
}

bool append_block(Chain& chain, Block block, const ConsensusResult& consensus) {
  return chain.append(std::move(block), consensus.committed);
}

Digest UpdateArchive::put(const LocalUpdate& update) {
  const Digest key = weights_digest(update.weights);
  entries_.try_emplace(key, encode_local_update(update));
  return key;
}

const Bytes* UpdateArchive::find(const Digest& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void UpdateArchive::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [key, bytes] : entries_) {
    std::ofstream out(dir / to_hex(key), std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw std::runtime_error("archive: cannot write " +
                               (dir / to_hex(key)).string());
    }
  }
}

UpdateArchive UpdateArchive::load(const std::filesystem::path& dir) {
  UpdateArchive archive;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto key = digest_from_hex(entry.path().filename().string());
    if (!key) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    Bytes bytes((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
    archive.entries_.emplace(*key, std::move(bytes));
  }
  return archive;
}

ChainVerification verify_chain(const Chain& chain,
                               const UpdateArchive* archive,
                               std::size_t size_cap) {
  const auto& blocks = chain.blocks();
  const auto& hashes = chain.hashes();
  auto fail = [](std::uint64_t height, std::string cause) {
    return ChainVerification{false, height, std::move(cause)};
  };
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& b = blocks[k];
    if (b.height != k) {
      return fail(k, "height " + std::to_string(b.height) + " at position " +
                         std::to_string(k));
    }
    if (auto err = check_block_invariants(b, size_cap)) return fail(k, *err);
    if (block_hash(b) != hashes[k]) {
      return fail(k, "block contents do not match recorded hash");
    }
    if (archive != nullptr) {
      for (const auto& rec : b.records) {
        const Bytes* stored = archive->find(rec.weights_digest);
        if (stored == nullptr) {
          return fail(k, "no archived update for node " +
                             std::to_string(rec.node_id));
        }
        try {
          const LocalUpdate u = decode_local_update(*stored);
          if (weights_digest(u.weights) != rec.weights_digest) {
            return fail(k, "archived weights digest mismatch for node " +
                               std::to_string(rec.node_id));
          }
        } catch (const LedgerFormatError& e) {
          return fail(k, std::string("archived update unreadable: ") +
                             e.what());
        }
      }
    }
    const Digest& expected_prev = k == 0 ? kZeroDigest : hashes[k - 1];
    if (b.prev_hash != expected_prev) {
      return fail(k, "prev_hash does not link to previous block");
    }
  }
  return {};
}

std::string format_export_line(const Block& block, const Digest& hash) {
  std::ostringstream out;
  out << "v=" << static_cast<int>(kEncodingVersion)
      << " height=" << block.height << " prev=" << to_hex(block.prev_hash)
      << " ts=" << block.timestamp << " agg=" << to_hex(block.aggregate_digest)
      << " size=" << block.size_bytes << " n=" << block.records.size();
  for (const auto& rec : block.records) {
    out << " r=" << rec.node_id << ':' << to_hex(rec.weights_digest) << ':'
        << FormatHexFloat(rec.anomaly_score) << ':' << (rec.accepted() ? 1 : 0)
        << ':' << static_cast<int>(rec.reason) << ':' << rec.payload_bytes;
  }
  out << " hash=" << to_hex(hash);
  return out.str();
}

void write_ledger_export(const Chain& chain,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    out << format_export_line(chain.blocks()[k], chain.hashes()[k]) << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path.string());
}

Chain read_ledger_export(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LedgerFormatError("cannot open " + path.string());
  std::vector<Block> blocks;
  std::vector<Digest> hashes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tokens = Split(line, ' ');
    Block b;
    std::optional<Digest> hash;
    std::optional<std::uint64_t> declared_count;
    std::size_t field = 0;
    static const char* kOrder[] = {"v", "height", "prev", "ts",
                                   "agg", "size", "n"};
    for (const auto& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw LedgerFormatError("export line " + std::to_string(line_no) +
                                ": token without '='");
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (field < 7) {
        if (key != kOrder[field]) {
          throw LedgerFormatError("export line " + std::to_string(line_no) +
                                  ": expected field '" + kOrder[field] + "'");
        }
        ++field;
      }
      if (key == "v") {
        if (ParseU64(val, "v") != kEncodingVersion) {
          throw LedgerFormatError("export: unsupported version");
        }
      } else if (key == "height") {
        b.height = ParseU64(val, "height");
      } else if (key == "prev") {
        b.prev_hash = ParseDigest(val, "prev");
      } else if (key == "ts") {
        b.timestamp = ParseU64(val, "ts");
      } else if (key == "agg") {
        b.aggregate_digest = ParseDigest(val, "agg");
      } else if (key == "size") {
        b.size_bytes = ParseU64(val, "size");
      } else if (key == "n") {
        declared_count = ParseU64(val, "n");
      } else if (key == "r") {
        const auto parts = Split(val, ':');
        if (parts.size() != 6) {
          throw LedgerFormatError("export line " + std::to_string(line_no) +
                                  ": record needs 6 fields");
        }
        LedgerRecord rec;
        const std::uint64_t node = ParseU64(parts[0], "r.node");
        if (node > UINT32_MAX) throw LedgerFormatError("export: node id range");
        rec.node_id = static_cast<NodeId>(node);
        rec.weights_digest = ParseDigest(parts[1], "r.digest");
        char* end = nullptr;
        rec.anomaly_score = std::strtod(parts[2].c_str(), &end);
        if (end == parts[2].c_str() || *end != '\0') {
          throw LedgerFormatError("export: bad anomaly score");
        }
        const std::uint64_t decision = ParseU64(parts[3], "r.decision");
        const std::uint64_t code = ParseU64(parts[4], "r.reason");
        const auto reason = code <= 255
                                ? reason_from_code(static_cast<std::uint8_t>(code))
                                : std::nullopt;
        if (!reason || decision > 1 ||
            (decision == 1) != (*reason == VerdictReason::kOk)) {
          throw LedgerFormatError("export: inconsistent verdict");
        }
        rec.reason = *reason;
        rec.payload_bytes = ParseU64(parts[5], "r.payload");
        b.records.push_back(rec);
      } else if (key == "hash") {
        hash = ParseDigest(val, "hash");
      } else {
        throw LedgerFormatError("export line " + std::to_string(line_no) +
                                ": unknown field '" + key + "'");
      }
    }
    if (field < 7 || !hash || !declared_count ||
        *declared_count != b.records.size()) {
      throw LedgerFormatError("export line " + std::to_string(line_no) +
                              ": incomplete or inconsistent block");
    }
    blocks.push_back(std::move(b));
    hashes.push_back(*hash);
  }
  if (blocks.empty()) throw LedgerFormatError("export: no blocks");
  return Chain::from_parts(std::move(blocks), std::move(hashes));
}

}  // namespace fedledger
