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

#ifndef FEDLEDGER_NUMERICS_H_
#define FEDLEDGER_NUMERICS_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace fedledger {

// Dense vector of 64-bit reals. Value type; copies are deep.
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t dim, double fill = 0.0)
      : values_(dim, fill) {}
  explicit RealVector(std::vector<double> values)
      : values_(std::move(values)) {}
  RealVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> view() const { return values_; }
  std::span<double> view() { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool all_finite() const;

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> values_;
};

// Deterministic per-stream generator. The output sequence is a pure function
// of (seed, stream_id); distinct stream ids give independent streams. Owned
// by exactly one logical node; never share across nodes.
class RngState {
 public:
  RngState(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Raw 64-bit draw.
  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform in (0, 1).
  double uniform_open();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  // Standard normal via the Marsaglia polar transform.
  double standard_normal();
  // Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  // Derives an independent child stream; advances this generator.
  RngState split(std::uint64_t child_id);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

RngState seeded_rng(std::uint64_t seed, std::uint64_t stream_id);

// dim i.i.d. draws from Normal(mean, stddev^2). Throws std::invalid_argument
// on negative or non-finite stddev.
RealVector gaussian_sample(RngState& rng, double mean, double stddev,
                           std::size_t dim);

// Fisher-Yates shuffle driven by `rng`; portable across standard libraries.
template <typename T>
void shuffle_in_place(std::span<T> items, RngState& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(const RealVector& v);
double l2_norm(std::span<const double> v);

RealVector add(const RealVector& a, const RealVector& b);
RealVector subtract(const RealVector& a, const RealVector& b);
RealVector scale(const RealVector& v, double factor);
// a + factor * b
RealVector axpy(const RealVector& a, double factor, const RealVector& b);

}  // namespace fedledger

#endif  // FEDLEDGER_NUMERICS_H_
