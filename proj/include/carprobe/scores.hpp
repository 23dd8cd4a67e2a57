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

#ifndef CARPROBE_SCORES_HPP_
#define CARPROBE_SCORES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carprobe/core.hpp"
#include "carprobe/density.hpp"
#include "carprobe/kernels.hpp"
#include "carprobe/linear_probe.hpp"
#include "carprobe/net.hpp"
#include "carprobe/svc.hpp"

namespace carprobe {

enum class ScoreKind { kTcarClass, kTcarConcept, kTcav };

std::string_view to_string(ScoreKind kind);

struct ScoreReport {
  ScoreKind kind = ScoreKind::kTcarClass;
  std::vector<std::string> concepts;
  std::optional<int> class_index;
  double value = 0.0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  /// Set for a concept-concept score whose union is empty (reported as 0).
  bool degenerate = false;
  std::string dataset_fingerprint;
};

std::string fingerprint_hex(std::uint64_t fingerprint);

/// Fraction of class-k representations inside the CAR.
ScoreReport tcar_class_concept(const CarClassifier& clf, const LatentDataset& dataset, int k);

/// Jaccard overlap of the two CAR memberships over the dataset.
ScoreReport tcar_concept_concept(const CarClassifier& clf1, const CarClassifier& clf2,
                                 const LatentDataset& dataset);

/// Whether dataset rows hold raw inputs x (latents computed through g) or
/// already-extracted representations h.
enum class RowSpace { kInput, kLatent };

/// w . grad_h p_k at h = g(x).
double cav_sensitivity(const CavClassifier& cav, const FeedforwardNet& net,
                       const Eigen::Ref<const Vector>& x, int k,
                       RowSpace space = RowSpace::kInput);

/// grad_h rho(h) . grad_h p_k(h) at h = g(x).
double density_sensitivity(const ConceptDensity& d, const FeedforwardNet& net,
                           const Eigen::Ref<const Vector>& x, int k,
                           RowSpace space = RowSpace::kInput);

/// Fraction of class-k examples with strictly positive CAV sensitivity.
ScoreReport tcav_score(const CavClassifier& cav, const FeedforwardNet& net,
                       const LatentDataset& dataset, int k, RowSpace space = RowSpace::kInput);

struct PermutationResult {
  double p_value = 1.0;
  double observed_accuracy = 0.0;
  std::vector<double> permuted_accuracies;  // in permutation order
};

/// Label-permutation significance test of a CAR classifier's holdout accuracy:
///   p = (1 + #{permuted accuracy >= observed}) / (1 + n_perm)
/// Each permutation reshuffles the positive/negative assignment of the
/// training examples and, independently, of the holdout examples (keeping
/// both balanced), refits on the shuffled training labels and scores against
/// the shuffled holdout labels. Comparisons use integer correct counts.
PermutationResult permutation_test(const ConceptSets& train, const LatentDataset& dataset,
                                   const KernelSpec& kernel, const TrainConfig& cfg,
                                   const ConceptSets& holdout, std::size_t n_perm,
                                   std::uint64_t seed, unsigned threads = 1);

double pearson_r(std::span<const double> a, std::span<const double> b);

}  // namespace carprobe

#endif  // CARPROBE_SCORES_HPP_
