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

#include "carprobe/attribution.hpp"

#include <cmath>
#include <sstream>

#include "carprobe/error.hpp"

namespace carprobe {

Baseline Baseline::mean_of(const Matrix& inputs) {
  if (inputs.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "mean baseline of no inputs");
  Baseline b;
  b.kind = BaselineKind::kMean;
  b.values = inputs.colwise().mean().transpose();
  return b;
}

Baseline Baseline::blur(double sigma, std::optional<GridShape> grid) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "blur sigma must be positive");
  Baseline b;
  b.kind = BaselineKind::kBlur;
  b.sigma = sigma;
  b.grid = grid;
  return b;
}

Baseline Baseline::explicit_vector(Vector values) {
  Baseline b;
  b.kind = BaselineKind::kExplicit;
  b.values = std::move(values);
  return b;
}

std::string Baseline::label() const {
  switch (kind) {
    case BaselineKind::kZeros: return "zeros";
    case BaselineKind::kMean: return "mean";
    case BaselineKind::kBlur: {
      std::ostringstream out;
      out << "blur:" << sigma;
      return out.str();
    }
    case BaselineKind::kExplicit: return "explicit";
  }
  return "zeros";
}

Vector resolve_baseline(const Baseline& baseline, const Eigen::Ref<const Vector>& x) {
  switch (baseline.kind) {
    case BaselineKind::kZeros: return Vector::Zero(x.size());
    case BaselineKind::kMean:
    case BaselineKind::kExplicit:
      require_same_dim(x.size(), baseline.values.size(), "baseline");
      return baseline.values;
    case BaselineKind::kBlur: return blur_baseline(x, baseline.grid, baseline.sigma);
  }
  return Vector::Zero(x.size());
}

AttributionResult integrated_gradients(const ScalarField& field,
                                       const Eigen::Ref<const Vector>& x,
                                       const AttributionConfig& cfg) {
  require_same_dim(static_cast<long>(field.input_dim), x.size(), "integrated_gradients");
  if (cfg.steps < 1) throw Error(ErrorKind::kInvalidArgument, "steps must be at least 1");
  const Vector base = resolve_baseline(cfg.baseline, x);
  const Vector delta = x - base;
  const auto m = static_cast<double>(cfg.steps);

  Vector avg_grad = Vector::Zero(x.size());
  for (std::size_t i = 0; i <= cfg.steps; ++i) {
    const double t = static_cast<double>(i) / m;
    const double weight = (i == 0 || i == cfg.steps) ? 0.5 / m : 1.0 / m;
    const Vector point = base + t * delta;
    avg_grad += weight * field.gradient(point);
  }

  AttributionResult result;
  result.scores = delta.cwiseProduct(avg_grad);
  result.target_value = field.value(Vector(x));
  result.baseline_value = field.value(base);
  result.completeness_gap =
      std::abs(result.scores.sum() - (result.target_value - result.baseline_value));
  result.steps = cfg.steps;
  return result;
}

ScalarField density_field(const FeedforwardNet& net, const ConceptDensity& d) {
  require_same_dim(static_cast<long>(net.latent_dim()), static_cast<long>(d.dim()),
                   "density_field");
  ScalarField field;
  field.input_dim = net.input_dim();
  field.value = [net, d](const Vector& x) { return density_eval(d, net.features(x)); };
  field.gradient = [net, d](const Vector& x) {
    return net.features_pullback(x, density_grad(d, net.features(x)));
  };
  return field;
}

AttributionResult car_feature_importance(const ConceptDensity& d, const FeedforwardNet& net,
                                         const Eigen::Ref<const Vector>& x,
                                         const AttributionConfig& cfg) {
  return integrated_gradients(density_field(net, d), x, cfg);
}

namespace {

// Symmetric reflection about the half-sample borders, period 2n.
std::size_t reflect(long p, long n) {
  const long period = 2 * n;
  long q = p % period;
  if (q < 0) q += period;
  return static_cast<std::size_t>(q < n ? q : period - 1 - q);
}

}  // namespace

Vector blur_baseline(const Eigen::Ref<const Vector>& x, std::optional<GridShape> grid,
                     double sigma) {
  if (!grid) throw Error(ErrorKind::kShapeUnknown, "blur baseline needs grid shape metadata");
  if (!(sigma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "blur sigma must be positive");
  const auto rows = static_cast<long>(grid->rows);
  const auto cols = static_cast<long>(grid->cols);
  if (rows * cols != x.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " does not match input length " + std::to_string(x.size()));
  }
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    weights[static_cast<std::size_t>(k + radius)] = w;
    total += w;
  }
  for (double& w : weights) w /= total;

  // Horizontal pass, then vertical.
  Vector tmp = Vector::Zero(x.size());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        acc += weights[static_cast<std::size_t>(k + radius)] *
               x(r * cols + static_cast<long>(reflect(c + k, cols)));
      }
      tmp(r * cols + c) = acc;
    }
  }
  Vector out = Vector::Zero(x.size());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        acc += weights[static_cast<std::size_t>(k + radius)] *
               tmp(static_cast<long>(reflect(r + k, rows)) * cols + c);
      }
      out(r * cols + c) = acc;
    }
  }
  return out;
}

CompletenessCheck completeness_check(const AttributionResult& result, double rel_tol) {
  CompletenessCheck check;
  check.gap = result.completeness_gap;
  check.allowed =
      rel_tol * std::abs(result.target_value - result.baseline_value) + kCompletenessFloor;
  check.pass = check.gap <= check.allowed;
  return check;
}

}  // namespace carprobe
