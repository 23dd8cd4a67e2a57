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

#ifndef CARPROBE_ATTRIBUTION_HPP_
#define CARPROBE_ATTRIBUTION_HPP_

#include <optional>
#include <string>

#include "carprobe/core.hpp"
#include "carprobe/density.hpp"
#include "carprobe/net.hpp"

namespace carprobe {

/// Row-major H x W layout of a flattened input vector.
struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

enum class BaselineKind { kZeros, kMean, kBlur, kExplicit };

struct Baseline {
  BaselineKind kind = BaselineKind::kZeros;
  double sigma = 2.0;               // blur only
  std::optional<GridShape> grid;    // blur only
  Vector values;                    // mean / explicit

  static Baseline zeros() { return {}; }
  static Baseline mean_of(const Matrix& inputs);
  static Baseline blur(double sigma, std::optional<GridShape> grid);
  static Baseline explicit_vector(Vector values);

  /// "zeros", "mean", "blur:<sigma>" or "explicit".
  std::string label() const;
};

struct AttributionConfig {
  std::size_t steps = 50;  // trapezoid intervals along the path
  Baseline baseline;
};

struct AttributionResult {
  Vector scores;
  double completeness_gap = 0.0;  // |sum(scores) - (f(x) - f(baseline))|
  double target_value = 0.0;
  double baseline_value = 0.0;
  std::size_t steps = 0;
};

/// Concrete baseline input for x.
Vector resolve_baseline(const Baseline& baseline, const Eigen::Ref<const Vector>& x);

/// Integrated gradients along the straight path from the baseline to x,
/// integrated with the trapezoid rule on `steps` equal intervals.
AttributionResult integrated_gradients(const ScalarField& field,
                                       const Eigen::Ref<const Vector>& x,
                                       const AttributionConfig& cfg);

/// x -> density(g(x)); the head of the network is not involved.
ScalarField density_field(const FeedforwardNet& net, const ConceptDensity& d);

AttributionResult car_feature_importance(const ConceptDensity& d, const FeedforwardNet& net,
                                         const Eigen::Ref<const Vector>& x,
                                         const AttributionConfig& cfg);

/// Separable Gaussian blur of a grid-shaped input. The kernel is truncated at
/// radius ceil(3 sigma) and normalized; borders use symmetric (half-sample)
/// reflection, which preserves total mass.
Vector blur_baseline(const Eigen::Ref<const Vector>& x, std::optional<GridShape> grid,
                     double sigma);

struct CompletenessCheck {
  bool pass = false;
  double gap = 0.0;
  double allowed = 0.0;
};

inline constexpr double kCompletenessFloor = 1e-8;

/// Passes when gap <= rel_tol * |f(x) - f(baseline)| + 1e-8.
CompletenessCheck completeness_check(const AttributionResult& result, double rel_tol);

}  // namespace carprobe

#endif  // CARPROBE_ATTRIBUTION_HPP_
