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

#ifndef CARPROBE_KERNELS_HPP_
#define CARPROBE_KERNELS_HPP_

#include <string>
#include <string_view>

#include "carprobe/core.hpp"

namespace carprobe {

enum class KernelKind { kLinear, kGaussianRbf };

std::string_view to_string(KernelKind kind);
/// Accepts "linear", "gaussian_rbf" and the shorthand "rbf".
KernelKind parse_kernel_kind(std::string_view name);

/// Kernel choice. The Gaussian RBF is radial:
///   k(a, b) = exp(-(gamma * |a - b|)^2)
/// so gamma is an inverse length scale, not the squared-distance coefficient.
struct KernelSpec {
  KernelKind kind = KernelKind::kGaussianRbf;
  double gamma = 1.0;

  static KernelSpec linear() { return {KernelKind::kLinear, 0.0}; }
  static KernelSpec rbf(double gamma);

  /// Throws kInvalidArgument when an RBF spec has a non-positive gamma.
  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Vector>& h1,
                   const Eigen::Ref<const Vector>& h2);

/// Gradient of k(h, h_ref) with respect to h.
Vector kernel_grad(const KernelSpec& k, const Eigen::Ref<const Vector>& h,
                   const Eigen::Ref<const Vector>& h_ref);

/// Entry (i, j) = k(a_i, b_j) over the rows of a and b.
Matrix gram_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b);

/// 1 / (d * pooled variance), pooled over every entry of reps.
double default_gamma(const Matrix& reps);

}  // namespace carprobe

#endif  // CARPROBE_KERNELS_HPP_
