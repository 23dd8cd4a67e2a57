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

#include "carprobe/density.hpp"

#include <algorithm>
#include <cmath>

#include "carprobe/error.hpp"

namespace carprobe {

ConceptDensity::ConceptDensity(std::string concept_name, KernelSpec kernel, Matrix pos_reps,
                               Matrix neg_reps)
    : concept_name_(std::move(concept_name)),
      kernel_(kernel),
      pos_reps_(std::move(pos_reps)),
      neg_reps_(std::move(neg_reps)) {
  kernel_.validate();
  if (pos_reps_.rows() == 0 || pos_reps_.rows() != neg_reps_.rows()) {
    throw Error(ErrorKind::kUnbalancedSets,
                "concept density needs equal, non-zero positive and negative counts (got " +
                    std::to_string(pos_reps_.rows()) + " and " + std::to_string(neg_reps_.rows()) +
                    ")");
  }
  require_same_dim(pos_reps_.cols(), neg_reps_.cols(), "ConceptDensity");
}

ConceptDensity ConceptDensity::from_sets(const ConceptSets& sets, const LatentDataset& dataset,
                                         const KernelSpec& kernel) {
  sets.validate_against(dataset.size());
  return ConceptDensity(sets.concept_name, kernel, dataset.gather(sets.positive),
                        dataset.gather(sets.negative));
}

ConceptDensity ConceptDensity::with_kernel(const KernelSpec& kernel) const {
  return ConceptDensity(concept_name_, kernel, pos_reps_, neg_reps_);
}

ConceptDensity ConceptDensity::swapped() const {
  return ConceptDensity(concept_name_, kernel_, neg_reps_, pos_reps_);
}

namespace {

double mean_kernel(const KernelSpec& k, const Matrix& reps, const Eigen::Ref<const Vector>& h) {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < reps.rows(); ++n) sum += kernel_eval(k, h, reps.row(n).transpose());
  return sum / static_cast<double>(reps.rows());
}

Vector mean_kernel_grad(const KernelSpec& k, const Matrix& reps,
                        const Eigen::Ref<const Vector>& h) {
  Vector sum = Vector::Zero(h.size());
  for (Eigen::Index n = 0; n < reps.rows(); ++n) sum += kernel_grad(k, h, reps.row(n).transpose());
  return sum / static_cast<double>(reps.rows());
}

}  // namespace

double density_eval(const ConceptDensity& d, const Eigen::Ref<const Vector>& h) {
  require_same_dim(static_cast<long>(d.dim()), h.size(), "density_eval");
  return mean_kernel(d.kernel(), d.pos_reps(), h) - mean_kernel(d.kernel(), d.neg_reps(), h);
}

Vector density_grad(const ConceptDensity& d, const Eigen::Ref<const Vector>& h) {
  require_same_dim(static_cast<long>(d.dim()), h.size(), "density_grad");
  return mean_kernel_grad(d.kernel(), d.pos_reps(), h) -
         mean_kernel_grad(d.kernel(), d.neg_reps(), h);
}

bool parzen_predict(const ConceptDensity& d, const Eigen::Ref<const Vector>& h) {
  return density_eval(d, h) >= 0.0;
}

double parzen_training_accuracy(const ConceptDensity& d) {
  std::size_t correct = 0;
  for (Eigen::Index n = 0; n < d.pos_reps().rows(); ++n) {
    correct += parzen_predict(d, d.pos_reps().row(n).transpose()) ? 1 : 0;
  }
  for (Eigen::Index n = 0; n < d.neg_reps().rows(); ++n) {
    correct += parzen_predict(d, d.neg_reps().row(n).transpose()) ? 0 : 1;
  }
  return static_cast<double>(correct) /
         static_cast<double>(d.pos_reps().rows() + d.neg_reps().rows());
}

std::vector<double> log_gamma_grid(double base, int decades, int per_decade) {
  if (!(base > 0.0) || decades < 0 || per_decade < 1) {
    throw Error(ErrorKind::kInvalidArgument, "bad gamma grid parameters");
  }
  std::vector<double> grid;
  for (int k = -decades * per_decade; k <= decades * per_decade; ++k) {
    grid.push_back(base * std::pow(10.0, static_cast<double>(k) / per_decade));
  }
  return grid;
}

DensityTuning tune_density_gamma(const ConceptDensity& d, std::vector<double> grid) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "empty gamma grid");
  std::sort(grid.begin(), grid.end());
  DensityTuning best{grid.front(), -1.0};
  for (double gamma : grid) {
    const double acc = parzen_training_accuracy(d.with_kernel(KernelSpec::rbf(gamma)));
    if (acc > best.training_accuracy) best = {gamma, acc};
  }
  return best;
}

}  // namespace carprobe
