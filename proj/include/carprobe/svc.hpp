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

#ifndef CARPROBE_SVC_HPP_
#define CARPROBE_SVC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "carprobe/core.hpp"
#include "carprobe/kernels.hpp"

namespace carprobe {

struct TrainConfig {
  double c_penalty = 1.0;
  double kkt_tolerance = 1e-3;
  /// One pass is n pair updates, n being the training set size.
  std::size_t max_passes = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Raw output of the soft-margin dual solver.
struct DualSolution {
  Vector alpha;       // unsigned multipliers, 0 <= alpha <= C
  Vector gradient;    // gradient of 0.5 a'Qa - sum(a) at alpha
  double bias = 0.0;
  bool converged = false;
  double kkt_violation = 0.0;  // max violating pair gap at exit
  std::size_t iterations = 0;
};

/// Solves  max_a  sum(a) - 0.5 sum_ij a_i a_j y_i y_j K_ij
///         s.t.   0 <= a_i <= C,  sum_i y_i a_i = 0
/// by sequential minimal optimization. Working pairs follow the maximal
/// violating pair rule with second-order selection of the partner; ties are
/// broken by a seeded scan order. `labels` holds +1 / -1.
DualSolution solve_svc_dual(const Matrix& gram, const std::vector<int>& labels,
                            const TrainConfig& cfg);

/// Offset of the decision function for a dual point: the mean of -y_t G_t over
/// unbounded multipliers, or the midpoint of the feasible interval when every
/// multiplier sits on a bound. Multipliers within `bound_tol` of 0 or C count
/// as bounded.
double dual_bias(const Vector& alpha, const Vector& gradient, const std::vector<int>& labels,
                 double c_penalty, double bound_tol = 0.0);

/// Kernel SVC describing a concept activation region.
struct CarClassifier {
  std::string concept_name;
  KernelSpec kernel;
  Matrix support_reps;  // one support vector per row
  Vector dual_coefs;    // signed: + for concept positives, - for negatives
  double bias = 0.0;
  double c_penalty = 1.0;

  bool converged = true;
  double kkt_violation = 0.0;
  std::size_t iterations = 0;

  std::size_t dim() const { return static_cast<std::size_t>(support_reps.cols()); }
};

CarClassifier fit_car(const ConceptSets& train, const LatentDataset& dataset,
                      const KernelSpec& kernel, const TrainConfig& cfg);

double decision_value(const CarClassifier& clf, const Eigen::Ref<const Vector>& h);

/// True when h lies in the concept activation region (decision value >= 0).
bool predict_car(const CarClassifier& clf, const Eigen::Ref<const Vector>& h);

/// Dual objective written with the positive/negative kernel blocks:
///   sum(a+) + sum(a-) - 0.5 (a+'Kpp a+ + a-'Knn a- - 2 a+'Kpn a-)
double dual_objective(const Vector& alpha_pos, const Vector& alpha_neg, const Matrix& k_pp,
                      const Matrix& k_nn, const Matrix& k_pn);

struct Accuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

/// Fraction of `sets` (positives expected in the CAR, negatives outside)
/// classified correctly.
Accuracy car_accuracy(const CarClassifier& clf, const LatentDataset& dataset,
                      const ConceptSets& sets);

struct TuneCandidate {
  KernelSpec kernel;
  double c_penalty = 1.0;
};

struct TuneResult {
  KernelSpec kernel;
  double c_penalty = 1.0;
  double validation_accuracy = 0.0;
  std::vector<double> candidate_accuracies;  // same order as the candidates
};

/// Exhaustive grid search; the first candidate wins ties.
TuneResult tune_kernel(const ConceptSets& train, const LatentDataset& dataset,
                       const std::vector<TuneCandidate>& candidates, double val_fraction,
                       std::uint64_t seed);

}  // namespace carprobe

#endif  // CARPROBE_SVC_HPP_
