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

#ifndef FEDLEDGER_DATA_H_
#define FEDLEDGER_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedledger/numerics.h"

namespace fedledger {

// Raised for unreadable or malformed input data. The message names the
// offending file, row, or column.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major binary-labelled dataset: 0 = benign, 1 = attack.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t dim, std::vector<std::string> feature_names = {});

  std::size_t rows() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  // Appends one example. Throws std::invalid_argument on a dimension
  // mismatch or a label outside {0, 1}.
  void add_row(std::span<const double> features, int label);

  // New dataset holding the given rows, in order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  std::size_t positive_count() const;

  friend bool operator==(const LabeledDataset&,
                         const LabeledDataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> feature_names_;
};

struct CsvOptions {
  std::string label_column = "label";
  std::set<std::string> positive_labels = {"1"};
  bool normalize = true;
};

// Reads a comma-separated file with a header row. Every column other than the
// label column must be numeric. With `normalize`, each feature column is
// min-max scaled into [0, 1]; constant columns map to 0.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvOptions& options);

// Writes the same schema load_csv reads, with labels as 0/1.
void write_csv(const LabeledDataset& dataset, const std::filesystem::path& path,
               const std::string& label_column = "label");

// In-place min-max scaling of every feature column into [0, 1].
void normalize_min_max(LabeledDataset& dataset);

struct SyntheticSpec {
  std::size_t sample_count = 10000;
  std::size_t feature_dim = 20;
  double class_balance = 0.5;
  double margin = 0.5;
  double noise_std = 0.0;

  void validate() const;
};

// Gaussian features labelled by a hidden unit hyperplane. The bias is the
// empirical quantile that yields the requested class balance; every point is
// then pushed `margin` away from the hyperplane on its own side, so with
// noise_std == 0 the classes are linearly separable with that margin. Label
// noise perturbs the score before thresholding.
LabeledDataset generate_synthetic(const SyntheticSpec& spec, RngState& rng);

enum class PartitionMode { kIid, kLabelSkew };

struct PartitionSpec {
  std::size_t node_count = 10;
  PartitionMode mode = PartitionMode::kIid;
  double concentration = 1.0;
  double holdout_fraction = 0.2;

  void validate() const;
};

struct NodeShard {
  LabeledDataset train;
  LabeledDataset holdout;
  // Source row indices, train rows first then holdout rows.
  std::vector<std::size_t> source_rows;
};

// Disjoint, exhaustive split of `dataset` across nodes. iid: seeded shuffle
// then contiguous slices whose sizes differ by at most one. label_skew: each
// label's rows are spread across nodes with Dirichlet(concentration)
// proportions; a node left empty borrows one row from the largest node. Each
// node's holdout is floor(holdout_fraction * share) rows, capped so at least
// one training row remains.
std::vector<NodeShard> partition(const LabeledDataset& dataset,
                                 const PartitionSpec& spec, RngState& rng);

// Seeded split into (train, test) with floor(test_fraction * rows) test rows.
std::pair<LabeledDataset, LabeledDataset> train_test_split(
    const LabeledDataset& dataset, double test_fraction, RngState& rng);

}  // namespace fedledger

#endif  // FEDLEDGER_DATA_H_
