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

#ifndef CARPROBE_NET_HPP_
#define CARPROBE_NET_HPP_

#include <functional>
#include <string_view>
#include <vector>

#include "carprobe/core.hpp"

namespace carprobe {

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// y = act(W x + b); weights(i, j) multiplies input j into output i.
struct DenseLayer {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::kIdentity;
  double slope = 0.01;  // leaky_relu only
};

/// Dense feedforward network f = l o g, split after `cut_index` layers:
/// g is layers [0, cut), the head l is layers [cut, L) followed by softmax.
///
/// The relu derivative at exactly zero is taken as 0 (leaky relu: its slope).
class FeedforwardNet {
 public:
  FeedforwardNet(std::vector<DenseLayer> layers, std::size_t cut_index);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t cut_index() const { return cut_; }
  std::size_t input_dim() const;
  std::size_t latent_dim() const;
  std::size_t output_dim() const;

  /// Logits of the full network.
  Vector forward(const Eigen::Ref<const Vector>& x) const;
  /// h = g(x).
  Vector features(const Eigen::Ref<const Vector>& x) const;
  Vector head_logits(const Eigen::Ref<const Vector>& h) const;
  Vector head_probs(const Eigen::Ref<const Vector>& h) const;
  double head_prob(const Eigen::Ref<const Vector>& h, int k) const;

  /// Gradient of head_prob(h, k) with respect to h.
  Vector latent_gradient(const Eigen::Ref<const Vector>& h, int k) const;
  /// J_g(x)^T v: pulls a latent-space covector back to input space.
  Vector features_pullback(const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& v) const;

 private:
  Vector run(std::size_t begin, std::size_t end, const Eigen::Ref<const Vector>& in) const;
  Vector pullback(std::size_t begin, std::size_t end, const Eigen::Ref<const Vector>& in,
                  const Eigen::Ref<const Vector>& v) const;
  void check_class(int k) const;

  std::vector<DenseLayer> layers_;
  std::size_t cut_;
};

/// Numerically stable softmax (max subtracted).
Vector softmax(const Eigen::Ref<const Vector>& logits);

/// A differentiable scalar map on the input space.
struct ScalarField {
  std::size_t input_dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// x -> softmax(f(x))_k.
ScalarField class_probability_field(const FeedforwardNet& net, int k);

/// Exact reverse-mode gradient of `field` at x.
Vector input_gradient(const ScalarField& field, const Eigen::Ref<const Vector>& x);

}  // namespace carprobe

#endif  // CARPROBE_NET_HPP_
