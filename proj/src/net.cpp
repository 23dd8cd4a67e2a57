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

#include "carprobe/net.hpp"

#include <cmath>

#include "carprobe/error.hpp"

namespace carprobe {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kTanh: return "tanh";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error(ErrorKind::kSchemaError, "unknown activation '" + std::string(name) + "'");
}

namespace {

double activate(const DenseLayer& layer, double z) {
  switch (layer.activation) {
    case Activation::kIdentity: return z;
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kLeakyRelu: return z > 0.0 ? z : layer.slope * z;
    case Activation::kTanh: return std::tanh(z);
  }
  return z;
}

double activation_slope(const DenseLayer& layer, double z) {
  switch (layer.activation) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kLeakyRelu: return z > 0.0 ? 1.0 : layer.slope;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

}  // namespace

FeedforwardNet::FeedforwardNet(std::vector<DenseLayer> layers, std::size_t cut_index)
    : layers_(std::move(layers)), cut_(cut_index) {
  if (layers_.empty()) throw Error(ErrorKind::kInvalidArgument, "network needs at least one layer");
  if (cut_ > layers_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "cut index " + std::to_string(cut_) +
                                                 " exceeds layer count " +
                                                 std::to_string(layers_.size()));
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw Error(ErrorKind::kInvalidArgument, "layer " + std::to_string(i) + " is empty");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "layer " + std::to_string(i) + " bias length differs from output size");
    }
    if (i > 0 && layer.weights.cols() != layers_[i - 1].weights.rows()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "layer " + std::to_string(i) + " input size does not chain with layer " +
                      std::to_string(i - 1));
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw Error(ErrorKind::kNonFiniteValue, "layer " + std::to_string(i) + " has non-finite values");
    }
  }
}

std::size_t FeedforwardNet::input_dim() const {
  return static_cast<std::size_t>(layers_.front().weights.cols());
}

std::size_t FeedforwardNet::latent_dim() const {
  return cut_ == 0 ? input_dim() : static_cast<std::size_t>(layers_[cut_ - 1].weights.rows());
}

std::size_t FeedforwardNet::output_dim() const {
  return static_cast<std::size_t>(layers_.back().weights.rows());
}

Vector FeedforwardNet::run(std::size_t begin, std::size_t end,
                           const Eigen::Ref<const Vector>& in) const {
  Vector a = in;
  for (std::size_t l = begin; l < end; ++l) {
    const auto& layer = layers_[l];
    Vector z = layer.weights * a + layer.bias;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = activate(layer, z(i));
    a = std::move(z);
  }
  return a;
}

Vector FeedforwardNet::pullback(std::size_t begin, std::size_t end,
                                const Eigen::Ref<const Vector>& in,
                                const Eigen::Ref<const Vector>& v) const {
  // Forward sweep keeping pre-activations, then the reverse sweep.
  std::vector<Vector> pre;
  pre.reserve(end - begin);
  Vector a = in;
  for (std::size_t l = begin; l < end; ++l) {
    const auto& layer = layers_[l];
    Vector z = layer.weights * a + layer.bias;
    a = z;
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = activate(layer, a(i));
    pre.push_back(std::move(z));
  }
  Vector g = v;
  for (std::size_t l = end; l-- > begin;) {
    const auto& layer = layers_[l];
    const Vector& z = pre[l - begin];
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) *= activation_slope(layer, z(i));
    g = layer.weights.transpose() * g;
  }
  return g;
}

void FeedforwardNet::check_class(int k) const {
  if (k < 0 || static_cast<std::size_t>(k) >= output_dim()) {
    throw Error(ErrorKind::kBadClassIndex, "class " + std::to_string(k) + " outside [0, " +
                                               std::to_string(output_dim()) + ")");
  }
}

Vector FeedforwardNet::forward(const Eigen::Ref<const Vector>& x) const {
  require_same_dim(static_cast<long>(input_dim()), x.size(), "forward");
  return run(0, layers_.size(), x);
}

Vector FeedforwardNet::features(const Eigen::Ref<const Vector>& x) const {
  require_same_dim(static_cast<long>(input_dim()), x.size(), "features");
  return run(0, cut_, x);
}

Vector FeedforwardNet::head_logits(const Eigen::Ref<const Vector>& h) const {
  require_same_dim(static_cast<long>(latent_dim()), h.size(), "head_logits");
  return run(cut_, layers_.size(), h);
}

Vector FeedforwardNet::head_probs(const Eigen::Ref<const Vector>& h) const {
  return softmax(head_logits(h));
}

double FeedforwardNet::head_prob(const Eigen::Ref<const Vector>& h, int k) const {
  check_class(k);
  return head_probs(h)(k);
}

Vector FeedforwardNet::latent_gradient(const Eigen::Ref<const Vector>& h, int k) const {
  check_class(k);
  const Vector p = head_probs(h);
  // Row k of the softmax Jacobian: p_k (e_k - p).
  Vector dp = -p(k) * p;
  dp(k) += p(k);
  return pullback(cut_, layers_.size(), h, dp);
}

Vector FeedforwardNet::features_pullback(const Eigen::Ref<const Vector>& x,
                                         const Eigen::Ref<const Vector>& v) const {
  require_same_dim(static_cast<long>(input_dim()), x.size(), "features_pullback");
  require_same_dim(static_cast<long>(latent_dim()), v.size(), "features_pullback");
  return pullback(0, cut_, x, v);
}

Vector softmax(const Eigen::Ref<const Vector>& logits) {
  const double shift = logits.maxCoeff();
  Vector e = (logits.array() - shift).exp().matrix();
  return e / e.sum();
}

ScalarField class_probability_field(const FeedforwardNet& net, int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= net.output_dim()) {
    throw Error(ErrorKind::kBadClassIndex, "class " + std::to_string(k) + " outside [0, " +
                                               std::to_string(net.output_dim()) + ")");
  }
  ScalarField field;
  field.input_dim = net.input_dim();
  field.value = [net, k](const Vector& x) { return net.head_prob(net.features(x), k); };
  field.gradient = [net, k](const Vector& x) {
    return net.features_pullback(x, net.latent_gradient(net.features(x), k));
  };
  return field;
}

Vector input_gradient(const ScalarField& field, const Eigen::Ref<const Vector>& x) {
  require_same_dim(static_cast<long>(field.input_dim), x.size(), "input_gradient");
  return field.gradient(x);
}

}  // namespace carprobe
