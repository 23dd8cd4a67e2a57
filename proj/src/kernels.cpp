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

#include "carprobe/kernels.hpp"

#include <cmath>

#include "carprobe/error.hpp"

namespace carprobe {

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::kLinear ? "linear" : "gaussian_rbf";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "gaussian_rbf" || name == "rbf") return KernelKind::kGaussianRbf;
  throw Error(ErrorKind::kInvalidArgument, "unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec KernelSpec::rbf(double gamma) {
  KernelSpec k{KernelKind::kGaussianRbf, gamma};
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::kGaussianRbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw Error(ErrorKind::kInvalidArgument,
                "gaussian_rbf gamma must be positive and finite, got " + std::to_string(gamma));
  }
}

double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Vector>& h1,
                   const Eigen::Ref<const Vector>& h2) {
  require_same_dim(h1.size(), h2.size(), "kernel_eval");
  if (k.kind == KernelKind::kLinear) return h1.dot(h2);
  // Summing squared differences in index order keeps k(a, b) == k(b, a) bitwise.
  const double dist2 = (h1 - h2).squaredNorm();
  return std::exp(-k.gamma * k.gamma * dist2);
}

Vector kernel_grad(const KernelSpec& k, const Eigen::Ref<const Vector>& h,
                   const Eigen::Ref<const Vector>& h_ref) {
  require_same_dim(h.size(), h_ref.size(), "kernel_grad");
  if (k.kind == KernelKind::kLinear) return h_ref;
  const Vector diff = h - h_ref;
  const double value = std::exp(-k.gamma * k.gamma * diff.squaredNorm());
  return (-2.0 * k.gamma * k.gamma * value) * diff;
}

Matrix gram_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b) {
  require_same_dim(a.cols(), b.cols(), "gram_matrix");
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = kernel_eval(k, a.row(i).transpose(), b.row(j).transpose());
    }
  }
  return out;
}

double default_gamma(const Matrix& reps) {
  if (reps.size() == 0) throw Error(ErrorKind::kDegenerateData, "empty representation matrix");
  const double mean = reps.mean();
  const double variance = (reps.array() - mean).square().mean();
  if (!(variance > 0.0)) {
    throw Error(ErrorKind::kDegenerateData, "representations have zero variance");
  }
  return 1.0 / (static_cast<double>(reps.cols()) * variance);
}

}  // namespace carprobe
