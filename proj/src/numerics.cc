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

#include "fedledger/numerics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedledger {

namespace {

std::seed_seq MakeSeedSeq(std::uint64_t seed, std::uint64_t stream_id) {
  // std::seed_seq's mixing is fully specified by the standard, so the derived
  // engine state is identical on every conforming implementation.
  return std::seed_seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id),
      static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
}

void CheckSameDim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

}  // namespace

bool RealVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

RngState::RngState(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  auto seq = MakeSeedSeq(seed, stream_id);
  engine_.seed(seq);
}

double RngState::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngState::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RngState::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound is zero");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

double RngState::standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  return u * factor;
}

double RngState::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    // Boost to shape + 1 and correct with U^(1/shape).
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

RngState RngState::split(std::uint64_t child_id) {
  return RngState(engine_(), child_id);
}

RngState seeded_rng(std::uint64_t seed, std::uint64_t stream_id) {
  return RngState(seed, stream_id);
}

RealVector gaussian_sample(RngState& rng, double mean, double stddev,
                           std::size_t dim) {
  if (!(stddev >= 0.0) || !std::isfinite(stddev)) {
    throw std::invalid_argument("gaussian_sample: stddev must be >= 0");
  }
  RealVector out(dim, mean);
  if (stddev == 0.0) return out;
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = mean + stddev * rng.standard_normal();
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  CheckSameDim(a.size(), b.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(std::span<const double> v) {
  double largest = 0.0;
  for (double x : v) largest = std::max(largest, std::abs(x));
  if (largest == 0.0 || !std::isfinite(largest)) return largest;
  double sum = 0.0;
  for (double x : v) {
    const double r = x / largest;
    sum += r * r;
  }
  return largest * std::sqrt(sum);
}

double l2_norm(const RealVector& v) { return l2_norm(v.view()); }

RealVector add(const RealVector& a, const RealVector& b) {
  return axpy(a, 1.0, b);
}

RealVector subtract(const RealVector& a, const RealVector& b) {
  CheckSameDim(a.dim(), b.dim(), "subtract");
  RealVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

RealVector scale(const RealVector& v, double factor) {
  RealVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = v[i] * factor;
  return out;
}

RealVector axpy(const RealVector& a, double factor, const RealVector& b) {
  CheckSameDim(a.dim(), b.dim(), "axpy");
  RealVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + factor * b[i];
  return out;
}

}  // namespace fedledger
