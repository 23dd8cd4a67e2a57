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

#ifndef CARPROBE_DENSITY_HPP_
#define CARPROBE_DENSITY_HPP_

#include <string>
#include <vector>

#include "carprobe/core.hpp"
#include "carprobe/kernels.hpp"

namespace carprobe {

/// Concept density: mean kernel similarity to the positive representations
/// minus mean kernel similarity to the negative ones. Real-valued; its sign
/// is the Parzen window concept classifier.
class ConceptDensity {
 public:
  ConceptDensity(std::string concept_name, KernelSpec kernel, Matrix pos_reps, Matrix neg_reps);

  /// Gathers the representations of `sets` from `dataset`.
  static ConceptDensity from_sets(const ConceptSets& sets, const LatentDataset& dataset,
                                  const KernelSpec& kernel);

  const std::string& concept_name() const { return concept_name_; }
  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& pos_reps() const { return pos_reps_; }
  const Matrix& neg_reps() const { return neg_reps_; }
  std::size_t dim() const { return static_cast<std::size_t>(pos_reps_.cols()); }

  ConceptDensity with_kernel(const KernelSpec& kernel) const;
  /// Positive and negative sets exchanged.
  ConceptDensity swapped() const;

 private:
  std::string concept_name_;
  KernelSpec kernel_;
  Matrix pos_reps_;
  Matrix neg_reps_;
};

double density_eval(const ConceptDensity& d, const Eigen::Ref<const Vector>& h);
Vector density_grad(const ConceptDensity& d, const Eigen::Ref<const Vector>& h);
/// True when density_eval(h) >= 0.
bool parzen_predict(const ConceptDensity& d, const Eigen::Ref<const Vector>& h);

/// Fraction of the stored positive and negative representations that the
/// Parzen classifier assigns to their own side.
double parzen_training_accuracy(const ConceptDensity& d);

/// log-spaced gamma grid: base * 10^(k / per_decade) for k in [-decades*per_decade, +...].
std::vector<double> log_gamma_grid(double base, int decades = 2, int per_decade = 4);

struct DensityTuning {
  double gamma = 1.0;
  double training_accuracy = 0.0;
};

/// Picks the RBF gamma from `grid` that maximizes Parzen training accuracy;
/// ties go to the smallest gamma.
DensityTuning tune_density_gamma(const ConceptDensity& d, std::vector<double> grid);

}  // namespace carprobe

#endif  // CARPROBE_DENSITY_HPP_
