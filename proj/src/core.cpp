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

#include "carprobe/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "carprobe/error.hpp"
#include "carprobe/random.hpp"

namespace carprobe {

LatentDataset::LatentDataset(std::vector<std::string> ids, Matrix reps,
                             std::optional<std::vector<int>> labels,
                             ConceptTruth concept_truth)
    : ids_(std::move(ids)),
      reps_(std::move(reps)),
      labels_(std::move(labels)),
      concept_truth_(std::move(concept_truth)) {
  const auto n = ids_.size();
  if (static_cast<std::size_t>(reps_.rows()) != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "reps has " + std::to_string(reps_.rows()) + " rows but " +
                    std::to_string(n) + " ids were given");
  }
  if (reps_.cols() < 1) {
    throw Error(ErrorKind::kInvalidArgument, "latent dimension must be at least 1");
  }
  if (!reps_.allFinite()) {
    throw Error(ErrorKind::kNonFiniteValue, "latent representations contain NaN or Inf");
  }
  if (labels_) {
    if (labels_->size() != n) {
      throw Error(ErrorKind::kDimensionMismatch, "labels length differs from row count");
    }
    for (int label : *labels_) {
      if (label < 0) throw Error(ErrorKind::kInvalidArgument, "class labels must be >= 0");
    }
  }
  for (const auto& [name, truth] : concept_truth_) {
    if (truth.size() != n) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "concept truth for '" + name + "' has length " + std::to_string(truth.size()) +
                      ", expected " + std::to_string(n));
    }
  }
  index_.reserve(n);
  for (Index i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorKind::kDuplicateId, "example id '" + ids_[i] + "' appears twice");
    }
  }
}

const std::vector<int>& LatentDataset::labels() const {
  if (!labels_) throw Error(ErrorKind::kInvalidArgument, "dataset has no class labels");
  return *labels_;
}

int LatentDataset::num_classes() const {
  const auto& l = labels();
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

bool LatentDataset::has_concept(std::string_view name) const {
  return concept_truth_.find(name) != concept_truth_.end();
}

const std::vector<bool>& LatentDataset::truth(std::string_view concept_name) const {
  auto it = concept_truth_.find(concept_name);
  if (it == concept_truth_.end()) {
    throw Error(ErrorKind::kUnknownConcept,
                "no truth annotations for concept '" + std::string(concept_name) + "'");
  }
  return it->second;
}

std::optional<Index> LatentDataset::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Index> LatentDataset::class_indices(int k) const {
  const auto& l = labels();
  std::vector<Index> out;
  for (Index i = 0; i < l.size(); ++i) {
    if (l[i] == k) out.push_back(i);
  }
  return out;
}

Matrix LatentDataset::gather(std::span<const Index> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), reps_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) {
      throw Error(ErrorKind::kInvalidArgument, "row index " + std::to_string(rows[r]) +
                                                   " out of range");
    }
    out.row(static_cast<Eigen::Index>(r)) = reps_.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  return state;
}

namespace {

template <typename T>
std::uint64_t hash_value(const T& value, std::uint64_t state) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  return fnv1a64(buf, state);
}

}  // namespace

std::uint64_t LatentDataset::fingerprint() const {
  std::uint64_t h = fnv1a64({});
  h = hash_value(static_cast<std::uint64_t>(size()), h);
  h = hash_value(static_cast<std::uint64_t>(dim()), h);
  for (const auto& id : ids_) {
    h = fnv1a64({reinterpret_cast<const unsigned char*>(id.data()), id.size()}, h);
    h = hash_value('\0', h);
  }
  for (Eigen::Index i = 0; i < reps_.rows(); ++i) {
    for (Eigen::Index j = 0; j < reps_.cols(); ++j) h = hash_value(reps_(i, j), h);
  }
  if (labels_) {
    for (int label : *labels_) h = hash_value(static_cast<std::int64_t>(label), h);
  }
  return h;
}

void ConceptSets::validate() const {
  if (positive.empty() || negative.empty()) {
    throw Error(ErrorKind::kInsufficientExamples,
                "concept '" + concept_name + "' needs at least one example per side");
  }
  if (positive.size() != negative.size()) {
    throw Error(ErrorKind::kUnbalancedSets,
                "concept '" + concept_name + "' has " + std::to_string(positive.size()) +
                    " positives and " + std::to_string(negative.size()) + " negatives");
  }
  std::unordered_set<Index> seen;
  for (auto side : {&positive, &negative}) {
    for (Index i : *side) {
      if (!seen.insert(i).second) {
        throw Error(ErrorKind::kDuplicateId, "concept '" + concept_name + "' repeats row " +
                                                 std::to_string(i));
      }
    }
  }
}

void ConceptSets::validate_against(std::size_t dataset_size) const {
  validate();
  for (auto side : {&positive, &negative}) {
    for (Index i : *side) {
      if (i >= dataset_size) {
        throw Error(ErrorKind::kUnknownId, "concept '" + concept_name + "' references row " +
                                               std::to_string(i) + " beyond dataset size " +
                                               std::to_string(dataset_size));
      }
    }
  }
}

ConceptSets balanced_sample(const LatentDataset& dataset, std::string_view concept_name,
                            std::size_t n_per_side, std::uint64_t seed) {
  const auto& truth = dataset.truth(concept_name);
  std::vector<Index> pos;
  std::vector<Index> neg;
  for (Index i = 0; i < truth.size(); ++i) (truth[i] ? pos : neg).push_back(i);
  if (n_per_side == 0 || pos.size() < n_per_side || neg.size() < n_per_side) {
    throw Error(ErrorKind::kInsufficientExamples,
                "concept '" + std::string(concept_name) + "' requested " +
                    std::to_string(n_per_side) + " per side; available positives=" +
                    std::to_string(pos.size()) + " negatives=" + std::to_string(neg.size()));
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  pos.resize(n_per_side);
  neg.resize(n_per_side);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  return ConceptSets{std::string(concept_name), std::move(pos), std::move(neg)};
}

std::pair<ConceptSets, ConceptSets> holdout_split(const ConceptSets& sets,
                                                  std::size_t holdout_per_side,
                                                  std::uint64_t seed) {
  sets.validate();
  if (holdout_per_side == 0 || holdout_per_side >= sets.per_side()) {
    throw Error(ErrorKind::kInsufficientExamples,
                "holdout of " + std::to_string(holdout_per_side) +
                    " per side needs 0 < holdout < " + std::to_string(sets.per_side()));
  }
  Rng rng(seed);
  auto pos = sets.positive;
  auto neg = sets.negative;
  rng.shuffle(pos);
  rng.shuffle(neg);
  const auto h = static_cast<std::ptrdiff_t>(holdout_per_side);
  ConceptSets holdout{sets.concept_name, {pos.begin(), pos.begin() + h},
                      {neg.begin(), neg.begin() + h}};
  ConceptSets train{sets.concept_name, {pos.begin() + h, pos.end()}, {neg.begin() + h, neg.end()}};
  for (auto* s : {&holdout, &train}) {
    std::sort(s->positive.begin(), s->positive.end());
    std::sort(s->negative.begin(), s->negative.end());
  }
  return {std::move(train), std::move(holdout)};
}

}  // namespace carprobe
