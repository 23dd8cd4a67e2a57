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

#ifndef CARPROBE_TESTS_FIXTURES_HPP_
#define CARPROBE_TESTS_FIXTURES_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "carprobe/core.hpp"
#include "carprobe/net.hpp"
#include "carprobe/random.hpp"

namespace carprobe::testing {

inline std::vector<std::string> make_ids(std::size_t n, const char* prefix = "x") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

inline Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

inline Vector gaussian_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

// Dataset whose rows are the given points, positives first; ConceptSets pair
// them up in row order.
inline LatentDataset two_sided_dataset(const Matrix& pos, const Matrix& neg) {
  Matrix reps(pos.rows() + neg.rows(), pos.cols());
  reps << pos, neg;
  return LatentDataset(make_ids(static_cast<std::size_t>(reps.rows())), reps);
}

inline ConceptSets two_sided_sets(Eigen::Index n_pos, const char* name = "c") {
  ConceptSets s;
  s.concept_name = name;
  for (Eigen::Index i = 0; i < n_pos; ++i) {
    s.positive.push_back(static_cast<Index>(i));
    s.negative.push_back(static_cast<Index>(n_pos + i));
  }
  return s;
}


// Dense net with the given layer widths; hidden layers use `hidden`, the last
// layer is the identity (logits).
inline FeedforwardNet random_net(Rng& rng, const std::vector<Eigen::Index>& widths,
                                 Activation hidden, std::size_t cut, double scale = 1.0) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    const double s = scale / std::sqrt(static_cast<double>(widths[l]));
    layer.weights = gaussian_matrix(rng, widths[l + 1], widths[l], s);
    layer.bias = gaussian_vector(rng, widths[l + 1], 0.5);
    layer.activation = l + 2 < widths.size() ? hidden : Activation::kIdentity;
    layer.slope = 0.1;
    layers.push_back(std::move(layer));
  }
  return FeedforwardNet(std::move(layers), cut);
}

// Smallest |pre-activation| over the piecewise-linear layers of a forward pass;
// large values mean x is away from relu kinks.
inline double kink_distance(const FeedforwardNet& net, const Vector& x) {
  double best = INFINITY;
  Vector a = x;
  for (const auto& layer : net.layers()) {
    const Vector z = layer.weights * a + layer.bias;
    if (layer.activation == Activation::kRelu || layer.activation == Activation::kLeakyRelu) {
      best = std::min(best, z.cwiseAbs().minCoeff());
    }
    a = z;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      switch (layer.activation) {
        case Activation::kRelu: a(i) = std::max(a(i), 0.0); break;
        case Activation::kLeakyRelu: a(i) = a(i) > 0 ? a(i) : layer.slope * a(i); break;
        case Activation::kTanh: a(i) = std::tanh(a(i)); break;
        case Activation::kIdentity: break;
      }
    }
  }
  return best;
}

}  // namespace carprobe::testing

#endif  // CARPROBE_TESTS_FIXTURES_HPP_
