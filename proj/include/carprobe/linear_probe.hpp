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

#ifndef CARPROBE_LINEAR_PROBE_HPP_
#define CARPROBE_LINEAR_PROBE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "carprobe/core.hpp"

namespace carprobe {

struct CavTrainLog {
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
  std::vector<double> losses;  // mean logistic loss after each epoch
};

/// Linear concept classifier; its weight vector is the concept activation vector.
struct CavClassifier {
  std::string concept_name;
  Vector weights;
  double bias = 0.0;
  CavTrainLog train_log;

  std::size_t dim() const { return static_cast<std::size_t>(weights.size()); }
};

struct CavConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 1000;
  /// Training stops once an epoch changes the loss by less than this; 0 disables.
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
};

/// Full-batch gradient descent on the mean logistic loss of w.h + b, starting
/// from zero (the seed is accepted for interface symmetry; the problem is convex).
CavClassifier fit_cav(const ConceptSets& train, const LatentDataset& dataset,
                      const CavConfig& cfg = {});

/// True ("positive") when w.h + b >= 0.
bool cav_predict(const CavClassifier& clf, const Eigen::Ref<const Vector>& h);

inline const Vector& cav_vector(const CavClassifier& clf) { return clf.weights; }

double cav_accuracy(const CavClassifier& clf, const LatentDataset& dataset,
                    const ConceptSets& sets);

}  // namespace carprobe

#endif  // CARPROBE_LINEAR_PROBE_HPP_
