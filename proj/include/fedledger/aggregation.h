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

#ifndef FEDLEDGER_AGGREGATION_H_
#define FEDLEDGER_AGGREGATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedledger/model.h"

namespace fedledger {

struct WeightedContribution {
  NodeId node_id = 0;
  ModelWeights weights;
  std::size_t sample_count = 1;
  bool accepted = true;
};

// Normalized reputations, indexed by node id.
struct TrustVector {
  std::vector<double> values;

  double operator[](NodeId id) const { return values.at(id); }
  std::size_t size() const { return values.size(); }
};

enum class AggregationMode { kPlain, kTrust };

// Sample-count weighted mean of the accepted contributions. Summation runs in
// ascending node id order, so the result does not depend on input order;
// every coordinate is kept inside the [min, max] range of its inputs.
// Throws std::invalid_argument when nothing is accepted, on mismatched
// dimensions, or on duplicate node ids.
ModelWeights fed_avg(std::span<const WeightedContribution> contribs);

// Euclidean distance between a local model and the global model.
double divergence(const ModelWeights& local, const ModelWeights& global);

// R_i / sum_j R_j. Throws std::invalid_argument if any reputation is negative
// or all are zero.
TrustVector trust_weights(std::span<const double> reputations);

TrustVector uniform_trust(std::size_t node_count);

// As fed_avg, with each contribution weighted by trust[node_id] *
// sample_count. Throws if the accepted contributions carry zero total trust.
ModelWeights trust_weighted_avg(std::span<const WeightedContribution> contribs,
                                const TrustVector& trust);

}  // namespace fedledger

#endif  // FEDLEDGER_AGGREGATION_H_
