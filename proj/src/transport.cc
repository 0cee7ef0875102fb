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

#include "fedledger/transport.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fedledger {

UpdateEncoding encode_dense(const RealVector& values,
                            std::size_t header_bytes) {
  UpdateEncoding enc;
  enc.kind = EncodingKind::kDense;
  enc.dim = values.dim();
  enc.header_bytes = header_bytes;
  enc.dense.reserve(values.dim());
  for (double v : values) enc.dense.push_back(static_cast<float>(v));
  return enc;
}

std::size_t topk_count(std::size_t dim, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("sparsify_topk: rho must be in (0, 1]");
  }
  // The 1e-9 slack keeps products such as 0.3 * 20 from rounding up past the
  // intended integer.
  const double exact = rho * static_cast<double>(dim);
  const auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(k, dim == 0 ? 0 : 1, dim);
}

UpdateEncoding sparsify_topk(const RealVector& delta, double rho,
                             std::size_t header_bytes) {
  const std::size_t dim = delta.dim();
  const std::size_t k = topk_count(dim, rho);

  std::vector<std::uint32_t> order(dim);
  std::iota(order.begin(), order.end(), 0u);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::uint32_t a, std::uint32_t b) {
                      const double ma = std::abs(delta[a]);
                      const double mb = std::abs(delta[b]);
                      return ma != mb ? ma > mb : a < b;
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());

  UpdateEncoding enc;
  enc.kind = EncodingKind::kSparse;
  enc.dim = dim;
  enc.header_bytes = header_bytes;
  enc.sparse.reserve(k);
  for (std::uint32_t idx : order) {
    enc.sparse.push_back({idx, static_cast<float>(delta[idx])});
  }
  return enc;
}

RealVector densify(const UpdateEncoding& encoding, std::size_t dim) {
  RealVector out(dim, 0.0);
  if (encoding.kind == EncodingKind::kDense) {
    if (encoding.dense.size() != dim) {
      throw std::invalid_argument("densify: dense payload has " +
                                  std::to_string(encoding.dense.size()) +
                                  " values, expected " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) out[i] = encoding.dense[i];
    return out;
  }
  for (const auto& e : encoding.sparse) {
    if (e.index >= dim) {
      throw std::out_of_range("densify: index " + std::to_string(e.index) +
                              " out of range for dim " + std::to_string(dim));
    }
    out[e.index] = e.value;
  }
  return out;
}

std::size_t payload_bytes(const UpdateEncoding& encoding) {
  if (encoding.kind == EncodingKind::kDense) {
    return encoding.header_bytes + 4 * encoding.dense.size();
  }
  return encoding.header_bytes + 8 * encoding.sparse.size();
}

double update_cost(std::size_t size_bytes, double latency,
                   const CostParams& params) {
  return params.alpha * static_cast<double>(size_bytes) +
         params.beta * latency;
}

}  // namespace fedledger
