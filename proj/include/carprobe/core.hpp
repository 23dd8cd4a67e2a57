/* Copyright 2026 The carprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CARPROBE_CORE_HPP_
#define CARPROBE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace carprobe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = std::size_t;

/// Latent representations h = g(x) for a set of examples, one row per example.
///
/// Rows are addressed by opaque string ids; the id -> row lookup is built once
/// at construction. Instances are immutable.
class LatentDataset {
 public:
  using ConceptTruth = std::map<std::string, std::vector<bool>, std::less<>>;

  LatentDataset(std::vector<std::string> ids, Matrix reps,
                std::optional<std::vector<int>> labels = std::nullopt,
                ConceptTruth concept_truth = {});

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(reps_.cols()); }

  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& reps() const { return reps_; }
  Vector row(Index i) const { return reps_.row(static_cast<Eigen::Index>(i)).transpose(); }

  bool has_labels() const { return labels_.has_value(); }
  /// Throws kInvalidArgument when the dataset is unlabeled.
  const std::vector<int>& labels() const;
  int num_classes() const;

  const ConceptTruth& concept_truth() const { return concept_truth_; }
  bool has_concept(std::string_view name) const;
  /// Throws kUnknownConcept.
  const std::vector<bool>& truth(std::string_view concept_name) const;

  std::optional<Index> index_of(std::string_view id) const;
  /// Row indices of class k, in row order.
  std::vector<Index> class_indices(int k) const;
  Matrix gather(std::span<const Index> rows) const;

  /// Stable 64-bit digest of ids, labels and reps (FNV-1a over canonical bytes).
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> ids_;
  Matrix reps_;
  std::optional<std::vector<int>> labels_;
  ConceptTruth concept_truth_;
  std::unordered_map<std::string, Index> index_;
};

/// Balanced positive / negative example sets for one concept, as row indices
/// into a LatentDataset.
struct ConceptSets {
  std::string concept_name;
  std::vector<Index> positive;
  std::vector<Index> negative;

  std::size_t per_side() const { return positive.size(); }

  /// Checks balance, non-emptiness, disjointness and absence of duplicates.
  void validate() const;
  /// validate() plus bounds against a dataset of `dataset_size` rows.
  void validate_against(std::size_t dataset_size) const;
};

ConceptSets balanced_sample(const LatentDataset& dataset, std::string_view concept_name,
                            std::size_t n_per_side, std::uint64_t seed);

/// Returns (train, holdout); holdout receives `holdout_per_side` examples per side.
std::pair<ConceptSets, ConceptSets> holdout_split(const ConceptSets& sets,
                                                  std::size_t holdout_per_side,
                                                  std::uint64_t seed);

/// FNV-1a 64 over a byte range, chainable through `state`.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace carprobe

#endif  // CARPROBE_CORE_HPP_
