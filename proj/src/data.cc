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

#include "fedledger/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fedledger {

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Minimal RFC 4180 field splitting: commas, optional double quotes with ""
// escapes, no embedded newlines.
std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(Trim(current));
  return fields;
}

bool ParseDouble(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

LabeledDataset::LabeledDataset(std::size_t dim,
                               std::vector<std::string> feature_names)
    : dim_(dim), feature_names_(std::move(feature_names)) {
  if (feature_names_.empty()) {
    for (std::size_t i = 0; i < dim_; ++i) {
      feature_names_.push_back("f" + std::to_string(i));
    }
  }
  if (feature_names_.size() != dim_) {
    throw std::invalid_argument("LabeledDataset: feature name count mismatch");
  }
}

void LabeledDataset::add_row(std::span<const double> features, int label) {
  if (features.size() != dim_) {
    throw std::invalid_argument("LabeledDataset::add_row: expected " +
                                std::to_string(dim_) + " features, got " +
                                std::to_string(features.size()));
  }
  if (label != 0 && label != 1) {
    throw std::invalid_argument("LabeledDataset::add_row: label must be 0/1");
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(static_cast<std::uint8_t>(label));
}

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> indices) const {
  LabeledDataset out(dim_, feature_names_);
  out.features_.reserve(indices.size() * dim_);
  out.labels_.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= rows()) {
      throw std::out_of_range("LabeledDataset::subset: row out of range");
    }
    const auto r = row(idx);
    out.features_.insert(out.features_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[idx]);
  }
  return out;
}

std::size_t LabeledDataset::positive_count() const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path.string() + "' is empty (no header row)");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const auto header = SplitCsvLine(line);
  const auto label_it =
      std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) {
    throw DataError("'" + path.string() + "': label column '" +
                    options.label_column + "' not found in header");
  }
  const std::size_t label_col =
      static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) names.push_back(header[c]);
  }
  LabeledDataset ds(names.size(), names);

  std::vector<double> values(names.size());
  std::size_t line_no = 1;
  std::size_t pending_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0) {
      throw DataError("'" + path.string() + "': blank line before line " +
                      std::to_string(line_no));
    }
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw DataError("'" + path.string() + "': line " +
                      std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    std::size_t f = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) continue;
      if (!ParseDouble(fields[c], values[f])) {
        throw DataError("'" + path.string() + "': column '" + header[c] +
                        "' is not numeric at line " + std::to_string(line_no) +
                        " (value '" + fields[c] + "')");
      }
      ++f;
    }
    const int label = options.positive_labels.count(fields[label_col]) ? 1 : 0;
    ds.add_row(values, label);
  }
  if (ds.empty()) {
    throw DataError("'" + path.string() + "' has a header but no data rows");
  }
  if (options.normalize) normalize_min_max(ds);
  return ds;
}

void write_csv(const LabeledDataset& dataset, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& name : dataset.feature_names()) out << name << ',';
  out << label_column << '\n';
  char buf[32];
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (double x : dataset.row(r)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), x);
      out << std::string_view(buf, res.ptr - buf) << ',';
    }
    out << dataset.label(r) << '\n';
  }
  if (!out) throw DataError("short write to '" + path.string() + "'");
}

void normalize_min_max(LabeledDataset& dataset) {
  const std::size_t dim = dataset.dim();
  const std::size_t rows = dataset.rows();
  if (rows == 0) return;
  std::vector<double> lo(dim, INFINITY), hi(dim, -INFINITY);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = dataset.row(r);
    for (std::size_t c = 0; c < dim; ++c) {
      lo[c] = std::min(lo[c], x[c]);
      hi[c] = std::max(hi[c], x[c]);
    }
  }
  LabeledDataset scaled(dim, dataset.feature_names());
  std::vector<double> buf(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = dataset.row(r);
    for (std::size_t c = 0; c < dim; ++c) {
      const double span = hi[c] - lo[c];
      buf[c] = span > 0.0 ? std::clamp((x[c] - lo[c]) / span, 0.0, 1.0) : 0.0;
    }
    scaled.add_row(buf, dataset.label(r));
  }
  dataset = std::move(scaled);
}

void SyntheticSpec::validate() const {
  if (sample_count == 0) throw std::invalid_argument("synthetic: no samples");
  if (feature_dim == 0) throw std::invalid_argument("synthetic: feature_dim 0");
  if (!(class_balance > 0.0 && class_balance < 1.0)) {
    throw std::invalid_argument("synthetic: class_balance must be in (0,1)");
  }
  if (!(margin > 0.0)) throw std::invalid_argument("synthetic: margin <= 0");
  if (!(noise_std >= 0.0)) {
    throw std::invalid_argument("synthetic: noise_std < 0");
  }
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec, RngState& rng) {
  spec.validate();
  const std::size_t n = spec.sample_count;
  const std::size_t d = spec.feature_dim;

  RealVector direction = gaussian_sample(rng, 0.0, 1.0, d);
  const double norm = l2_norm(direction);
  direction = norm > 0.0 ? scale(direction, 1.0 / norm) : RealVector(d, 0.0);
  if (norm == 0.0) direction[0] = 1.0;

  std::vector<double> points(n * d);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      points[i * d + c] = rng.standard_normal();
    }
    scores[i] = dot({points.data() + i * d, d}, direction.view());
  }

  // Bias search: the (1 - balance) empirical quantile of the clean scores.
  const auto positives = static_cast<std::size_t>(
      std::llround(spec.class_balance * static_cast<double>(n)));
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  double bias;
  if (positives == 0) {
    bias = sorted.back() + 1.0;
  } else {
    bias = sorted[n - positives];
  }

  LabeledDataset ds(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double side = scores[i] >= bias ? 1.0 : -1.0;
    for (std::size_t c = 0; c < d; ++c) {
      x[c] = points[i * d + c] + side * spec.margin * direction[c];
    }
    double noisy = dot(x, direction.view());
    if (spec.noise_std > 0.0) noisy += spec.noise_std * rng.standard_normal();
    ds.add_row(x, noisy >= bias ? 1 : 0);
  }
  return ds;
}

void PartitionSpec::validate() const {
  if (node_count == 0) throw std::invalid_argument("partition: zero nodes");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("partition: holdout_fraction not in [0,1)");
  }
  if (mode == PartitionMode::kLabelSkew &&
      !(concentration > 0.0 && std::isfinite(concentration))) {
    throw std::invalid_argument("partition: concentration must be > 0");
  }
}

std::vector<NodeShard> partition(const LabeledDataset& dataset,
                                 const PartitionSpec& spec, RngState& rng) {
  spec.validate();
  const std::size_t n = dataset.rows();
  const std::size_t nodes = spec.node_count;
  if (nodes > n) {
    throw std::invalid_argument("partition: " + std::to_string(nodes) +
                                " nodes but only " + std::to_string(n) +
                                " rows");
  }

  std::vector<std::vector<std::size_t>> shares(nodes);
  if (spec.mode == PartitionMode::kIid) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_in_place(std::span(order), rng);
    const std::size_t base = n / nodes;
    const std::size_t extra = n % nodes;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const std::size_t size = base + (i < extra ? 1 : 0);
      shares[i].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                       order.begin() + static_cast<std::ptrdiff_t>(pos + size));
      pos += size;
    }
  } else {
    for (int label = 0; label <= 1; ++label) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < n; ++r) {
        if (dataset.label(r) == label) rows.push_back(r);
      }
      if (rows.empty()) continue;
      shuffle_in_place(std::span(rows), rng);

      std::vector<double> weights(nodes);
      double total = 0.0;
      for (auto& w : weights) {
        w = rng.gamma(spec.concentration);
        total += w;
      }
      // Largest-remainder apportionment; ties go to the lower node index.
      const double m = static_cast<double>(rows.size());
      std::vector<std::size_t> counts(nodes);
      std::vector<std::pair<double, std::size_t>> remainders(nodes);
      std::size_t assigned = 0;
      for (std::size_t i = 0; i < nodes; ++i) {
        const double exact = weights[i] / total * m;
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        remainders[i] = {exact - static_cast<double>(counts[i]), i};
        assigned += counts[i];
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) {
                         return a.first > b.first;
                       });
      for (std::size_t k = 0; assigned < rows.size(); ++k, ++assigned) {
        ++counts[remainders[k % nodes].second];
      }
      std::size_t pos = 0;
      for (std::size_t i = 0; i < nodes; ++i) {
        shares[i].insert(shares[i].end(),
                         rows.begin() + static_cast<std::ptrdiff_t>(pos),
                         rows.begin() +
                             static_cast<std::ptrdiff_t>(pos + counts[i]));
        pos += counts[i];
      }
    }
    for (std::size_t i = 0; i < nodes; ++i) {
      if (!shares[i].empty()) continue;
      const auto largest = std::max_element(
          shares.begin(), shares.end(),
          [](const auto& a, const auto& b) { return a.size() < b.size(); });
      shares[i].push_back(largest->back());
      largest->pop_back();
    }
  }

  std::vector<NodeShard> out(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    auto& rows = shares[i];
    shuffle_in_place(std::span(rows), rng);
    std::size_t holdout = static_cast<std::size_t>(
        std::floor(spec.holdout_fraction * static_cast<double>(rows.size())));
    if (holdout >= rows.size()) holdout = rows.size() - 1;
    const std::size_t train = rows.size() - holdout;
    std::vector<std::size_t> train_rows(rows.begin(),
                                        rows.begin() +
                                            static_cast<std::ptrdiff_t>(train));
    std::vector<std::size_t> holdout_rows(
        rows.begin() + static_cast<std::ptrdiff_t>(train), rows.end());
    out[i].train = dataset.subset(train_rows);
    out[i].holdout = dataset.subset(holdout_rows);
    out[i].source_rows = std::move(rows);
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(
    const LabeledDataset& dataset, double test_fraction, RngState& rng) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("train_test_split: fraction not in [0,1)");
  }
  std::vector<std::size_t> order(dataset.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_in_place(std::span(order), rng);
  const auto test = static_cast<std::size_t>(
      std::floor(test_fraction * static_cast<double>(order.size())));
  const std::span<const std::size_t> all(order);
  return {dataset.subset(all.subspan(test)),
          dataset.subset(all.subspan(0, test))};
}

}  // namespace fedledger
