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

#include <gtest/gtest.h>

#include "oracles/finite_difference.hpp"
#include "test_support.hpp"

namespace carprobe {
namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(KernelEval, RbfAtDistanceFive) {
  // gamma * distance = 0.2 * 5 = 1.
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.2), v2(0, 0), v2(3, 4)), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.2), v2(0, 0), v2(3, 4)), 0.367879441171, 1e-12);
}

TEST(KernelEval, RbfSelfIsOne) {
  EXPECT_EQ(kernel_eval(KernelSpec::rbf(3.0), v2(1.5, -2), v2(1.5, -2)), 1.0);
}

TEST(KernelEval, LinearDotProduct) {
  EXPECT_EQ(kernel_eval(KernelSpec::linear(), v2(1, 2), v2(3, 4)), 11.0);
}

TEST(KernelEval, DimensionMismatch) {
  EXPECT_CAR_ERROR(kernel_eval(KernelSpec::linear(), v2(1, 2), Vector::Ones(3)),
                   ErrorKind::kDimensionMismatch);
  EXPECT_CAR_ERROR(kernel_grad(KernelSpec::rbf(1), v2(1, 2), Vector::Ones(3)),
                   ErrorKind::kDimensionMismatch);
}

TEST(KernelSpec, ValidatesGamma) {
  EXPECT_CAR_ERROR(KernelSpec::rbf(0.0), ErrorKind::kInvalidArgument);
  EXPECT_CAR_ERROR(KernelSpec::rbf(-1.0), ErrorKind::kInvalidArgument);
  EXPECT_NO_THROW(KernelSpec::linear().validate());
  EXPECT_EQ(parse_kernel_kind("rbf"), KernelKind::kGaussianRbf);
  EXPECT_EQ(parse_kernel_kind("gaussian_rbf"), KernelKind::kGaussianRbf);
  EXPECT_EQ(parse_kernel_kind("linear"), KernelKind::kLinear);
  EXPECT_CAR_ERROR(parse_kernel_kind("matern"), ErrorKind::kInvalidArgument);
}

TEST(KernelGrad, LinearReturnsReference) {
  EXPECT_EQ(kernel_grad(KernelSpec::linear(), v2(-7, 0.5), v2(3, 4)), v2(3, 4));
}

TEST(KernelGrad, RbfStationaryAtReference) {
  EXPECT_EQ(kernel_grad(KernelSpec::rbf(0.7), v2(2, 3), v2(2, 3)), Vector::Zero(2));
}

TEST(KernelGrad, RbfMatchesFiniteDifference) {
  const auto k = KernelSpec::rbf(0.5);
  const Vector ref = v2(0, 0);
  const Vector h = v2(1, 0);
  const Vector fd = oracle::central_difference(
      [&](const Vector& x) { return kernel_eval(k, x, ref); }, h, 1e-6);
  EXPECT_LT(oracle::relative_error(kernel_grad(k, h, ref), fd), 1e-6);
}

TEST(KernelGrad, RbfRandomFiniteDifference) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(6));
    const auto k = KernelSpec::rbf(0.2 + 1.5 * rng.uniform());
    const Vector h = testing::gaussian_vector(rng, d);
    const Vector r = testing::gaussian_vector(rng, d);
    const Vector fd = oracle::central_difference(
        [&](const Vector& x) { return kernel_eval(k, x, r); }, h);
    EXPECT_LT(oracle::relative_error(kernel_grad(k, h, r), fd), 1e-5) << "trial " << t;
  }
}

TEST(GramMatrix, SingleRow) {
  Matrix a(1, 2);
  a << 1, 2;
  const Matrix g = gram_matrix(KernelSpec::linear(), a, a);
  ASSERT_EQ(g.rows(), 1);
  EXPECT_EQ(g(0, 0), 5.0);
}

TEST(GramMatrix, RbfDiagonalIsOne) {
  Rng rng(2);
  const Matrix a = testing::gaussian_matrix(rng, 6, 3);
  const Matrix g = gram_matrix(KernelSpec::rbf(1.3), a, a);
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(g(i, i), 1.0);
}

TEST(GramMatrix, RectangularMatchesElementwise) {
  Rng rng(5);
  const Matrix a = testing::gaussian_matrix(rng, 3, 2);
  const Matrix b = testing::gaussian_matrix(rng, 2, 2);
  for (const auto& k : {KernelSpec::linear(), KernelSpec::rbf(0.9)}) {
    const Matrix g = gram_matrix(k, a, b);
    ASSERT_EQ(g.rows(), 3);
    ASSERT_EQ(g.cols(), 2);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        // Independent evaluation from the closed forms.
        const double expected = k.kind == KernelKind::kLinear
                                    ? a.row(i).dot(b.row(j))
                                    : std::exp(-std::pow(k.gamma * (a.row(i) - b.row(j)).norm(), 2));
        EXPECT_NEAR(g(i, j), expected, 1e-14);
      }
    }
  }
  EXPECT_CAR_ERROR(gram_matrix(KernelSpec::linear(), a, Matrix::Zero(2, 3)),
                   ErrorKind::kDimensionMismatch);
}

TEST(GramMatrix, SymmetricAndPsd) {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(15));
    const Matrix a = testing::gaussian_matrix(rng, n, 1 + static_cast<Eigen::Index>(rng.below(4)));
    const Matrix g = gram_matrix(KernelSpec::rbf(0.3 + 2 * rng.uniform()), a, a);
    EXPECT_EQ(g, g.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(KernelEval, SymmetricBitwise) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Vector a = testing::gaussian_vector(rng, 4);
    const Vector b = testing::gaussian_vector(rng, 4);
    for (const auto& k : {KernelSpec::linear(), KernelSpec::rbf(0.8)}) {
      EXPECT_EQ(kernel_eval(k, a, b), kernel_eval(k, b, a));
    }
  }
}

TEST(KernelEval, RbfIsRadial) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(5));
    Eigen::HouseholderQR<Matrix> qr(testing::gaussian_matrix(rng, d, d));
    const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Vector r = testing::gaussian_vector(rng, d, 3.0);
    const Vector a = testing::gaussian_vector(rng, d);
    const Vector b = testing::gaussian_vector(rng, d);
    const auto k = KernelSpec::rbf(0.6);
    EXPECT_NEAR(kernel_eval(k, q * a + r, q * b + r), kernel_eval(k, a, b), 1e-12);
  }
}

TEST(DefaultGamma, PooledVarianceHalf) {
  // Entries 0 and sqrt(2) in equal numbers have pooled variance 0.5; d = 2.
  Matrix m(2, 2);
  const double s = std::sqrt(2.0);
  m << 0, s, s, 0;
  EXPECT_NEAR(default_gamma(m), 1.0, 1e-15);
}

TEST(DefaultGamma, ConstantIsDegenerate) {
  EXPECT_CAR_ERROR(default_gamma(Matrix::Constant(4, 3, 2.5)), ErrorKind::kDegenerateData);
}

TEST(DefaultGamma, ScalesInverseSquare) {
  Rng rng(1);
  const Matrix m = testing::gaussian_matrix(rng, 20, 3);
  for (double s : {0.5, 2.0, 10.0}) {
    EXPECT_NEAR(default_gamma(s * m), default_gamma(m) / (s * s), 1e-12 * default_gamma(m));
  }
}

}  // namespace
}  // namespace carprobe
