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

#ifndef FEDLEDGER_TRANSPORT_H_
#define FEDLEDGER_TRANSPORT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fedledger/numerics.h"

namespace fedledger {

inline constexpr std::size_t kDefaultHeaderBytes = 16;

enum class EncodingKind : std::uint8_t { kDense = 0, kSparse = 1 };

struct SparseEntry {
  std::uint32_t index;
  float value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Wire form of one model message. Values travel as 32-bit IEEE-754 floats;
// sparse indices as 32-bit unsigned integers.
struct UpdateEncoding {
  EncodingKind kind = EncodingKind::kDense;
  std::size_t dim = 0;
  std::vector<float> dense;
  std::vector<SparseEntry> sparse;
  std::size_t header_bytes = kDefaultHeaderBytes;

  friend bool operator==(const UpdateEncoding&,
                         const UpdateEncoding&) = default;
};

// Round-to-nearest float quantization of every coordinate.
UpdateEncoding encode_dense(const RealVector& values,
                            std::size_t header_bytes = kDefaultHeaderBytes);

// Keeps the ceil(rho * dim) largest-magnitude coordinates, ties broken by
// lower index, emitted in ascending index order. Throws std::invalid_argument
// unless 0 < rho <= 1.
UpdateEncoding sparsify_topk(const RealVector& delta, double rho,
                             std::size_t header_bytes = kDefaultHeaderBytes);

// Number of coordinates sparsify_topk keeps for (dim, rho).
std::size_t topk_count(std::size_t dim, double rho);

// Expands either encoding to a dim-length vector, zeros where nothing was
// sent. Throws std::out_of_range for an index >= dim and
// std::invalid_argument when a dense payload's length differs from dim.
RealVector densify(const UpdateEncoding& encoding, std::size_t dim);

// header + 4 * dim (dense) or header + 8 * count (sparse).
std::size_t payload_bytes(const UpdateEncoding& encoding);

struct CostParams {
  double alpha = 1.0;  // per byte
  double beta = 1.0;   // per second of latency
};

// alpha * size + beta * latency.
double update_cost(std::size_t size_bytes, double latency,
                   const CostParams& params);

}  // namespace fedledger

#endif  // FEDLEDGER_TRANSPORT_H_
