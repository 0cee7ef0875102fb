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

#include "fedledger/aggregation.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace fedledger {

namespace {

std::vector<const WeightedContribution*> AcceptedInNodeOrder(
    std::span<const WeightedContribution> contribs) {
  std::vector<const WeightedContribution*> accepted;
  for (const auto& c : contribs) {
    if (c.accepted) accepted.push_back(&c);
  }
  if (accepted.empty()) {
    throw std::invalid_argument("aggregation: no accepted contributions");
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto* a, const auto* b) { return a->node_id < b->node_id; });
  const std::size_t dim = accepted.front()->weights.dim();
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (i > 0 && accepted[i]->node_id == accepted[i - 1]->node_id) {
      throw std::invalid_argument("aggregation: duplicate node id " +
                                  std::to_string(accepted[i]->node_id));
    }
    if (accepted[i]->weights.dim() != dim) {
      throw std::invalid_argument("aggregation: dimension mismatch");
    }
    if (accepted[i]->sample_count == 0) {
      throw std::invalid_argument("aggregation: zero sample count");
    }
  }
  return accepted;
}

ModelWeights WeightedMean(
    const std::vector<const WeightedContribution*>& accepted,
    const std::function<double(const WeightedContribution&)>& weight_of) {
  std::vector<double> coeffs;
  coeffs.reserve(accepted.size());
  double total = 0.0;
  for (const auto* c : accepted) {
    coeffs.push_back(weight_of(*c));
    total += coeffs.back();
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("aggregation: total weight is zero");
  }

  const std::size_t dim = accepted.front()->weights.dim();
  RealVector out(dim, 0.0);
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    const double share = coeffs[k] / total;
    const auto& w = accepted[k]->weights.values;
    for (std::size_t i = 0; i < dim; ++i) out[i] += share * w[i];
  }
  // Rounding can push a mean a few ulps outside its inputs' range.
  for (std::size_t i = 0; i < dim; ++i) {
    double lo = accepted.front()->weights.values[i];
    double hi = lo;
    for (const auto* c : accepted) {
      lo = std::min(lo, c->weights.values[i]);
      hi = std::max(hi, c->weights.values[i]);
    }
    out[i] = std::clamp(out[i], lo, hi);
  }
  return ModelWeights(std::move(out));
}

}  // namespace

ModelWeights fed_avg(std::span<const WeightedContribution> contribs) {
  const auto accepted = AcceptedInNodeOrder(contribs);
  return WeightedMean(accepted, [](const WeightedContribution& c) {
    return static_cast<double>(c.sample_count);
  });
}

double divergence(const ModelWeights& local, const ModelWeights& global) {
  if (local.dim() != global.dim()) {
    throw std::invalid_argument("divergence: dimension mismatch (" +
                                std::to_string(local.dim()) + " vs " +
                                std::to_string(global.dim()) + ")");
  }
  return l2_norm(subtract(local.values, global.values));
}

TrustVector trust_weights(std::span<const double> reputations) {
  double total = 0.0;
  for (double r : reputations) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("trust_weights: reputations must be >= 0");
    }
    total += r;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("trust_weights: all reputations are zero");
  }
  TrustVector trust;
  trust.values.reserve(reputations.size());
  for (double r : reputations) trust.values.push_back(r / total);
  return trust;
}

TrustVector uniform_trust(std::size_t node_count) {
  if (node_count == 0) throw std::invalid_argument("uniform_trust: no nodes");
  return TrustVector{
      std::vector<double>(node_count, 1.0 / static_cast<double>(node_count))};
}

ModelWeights trust_weighted_avg(std::span<const WeightedContribution> contribs,
                                const TrustVector& trust) {
  const auto accepted = AcceptedInNodeOrder(contribs);
  for (const auto* c : accepted) {
    if (c->node_id >= trust.size()) {
      throw std::invalid_argument("trust_weighted_avg: no trust for node " +
                                  std::to_string(c->node_id));
    }
  }
  return WeightedMean(accepted, [&](const WeightedContribution& c) {
    return trust[c.node_id] * static_cast<double>(c.sample_count);
  });
}

}  // namespace fedledger
