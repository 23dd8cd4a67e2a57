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

#include "carprobe/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "carprobe/error.hpp"
#include "carprobe/random.hpp"

namespace carprobe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinCurvature = 1e-12;

bool in_up_set(double alpha, int y, double c) {
  return (y > 0 && alpha < c) || (y < 0 && alpha > 0.0);
}

bool in_low_set(double alpha, int y, double c) {
  return (y > 0 && alpha > 0.0) || (y < 0 && alpha < c);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(c_penalty > 0.0) || !std::isfinite(c_penalty)) {
    throw Error(ErrorKind::kInvalidArgument, "c_penalty must be positive");
  }
  if (!(kkt_tolerance > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "kkt_tolerance must be positive");
  }
  if (max_passes == 0) throw Error(ErrorKind::kInvalidArgument, "max_passes must be positive");
}

DualSolution solve_svc_dual(const Matrix& gram, const std::vector<int>& labels,
                            const TrainConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (gram.rows() != n || gram.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "gram matrix must be n x n for n labels");
  }
  for (int y : labels) {
    if (y != 1 && y != -1) throw Error(ErrorKind::kInvalidArgument, "labels must be +1 or -1");
  }
  const double c = cfg.c_penalty;

  DualSolution sol;
  sol.alpha = Vector::Zero(n);
  sol.gradient = Vector::Constant(n, -1.0);
  Vector& alpha = sol.alpha;
  Vector& grad = sol.gradient;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(cfg.seed);
  rng.shuffle(order);

  const std::size_t max_iter = cfg.max_passes * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
  double gap = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    // First index: the most violating member of the up set.
    double g_max = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t : order) {
      if (in_up_set(alpha(t), labels[t], c)) {
        const double v = -labels[t] * grad(t);
        if (v > g_max) {
          g_max = v;
          i = t;
        }
      }
    }
    // Partner: largest guaranteed decrease among the violating low set.
    double g_min = kInf;
    Eigen::Index j = -1;
    double best_decrease = kInf;
    for (Eigen::Index t : order) {
      if (!in_low_set(alpha(t), labels[t], c)) continue;
      const double v = -labels[t] * grad(t);
      g_min = std::min(g_min, v);
      if (i < 0 || v >= g_max) continue;
      const double b = g_max - v;
      double a = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
      if (a <= 0.0) a = kMinCurvature;
      const double decrease = -(b * b) / a;
      if (decrease < best_decrease) {
        best_decrease = decrease;
        j = t;
      }
    }
    gap = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (i < 0 || j < 0 || gap <= cfg.kkt_tolerance) {
      sol.converged = true;
      break;
    }
    if (iter >= max_iter) {
      sol.converged = false;
      break;
    }

    const int yi = labels[i];
    const int yj = labels[j];
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    double curvature = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
    if (curvature <= 0.0) curvature = kMinCurvature;

    // Two-variable subproblem along the balance-preserving direction,
    // then clipped back into the box.
    if (yi != yj) {
      const double delta = (-grad(i) - grad(j)) / curvature;
      const double diff = old_i - old_j;
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) {
          alpha(j) = 0.0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      const double delta = (grad(i) - grad(j)) / curvature;
      const double sum = old_i + old_j;
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = sum;
      }
    }

    const double d_i = (alpha(i) - old_i) * yi;
    const double d_j = (alpha(j) - old_j) * yj;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad(t) += labels[t] * (gram(t, i) * d_i + gram(t, j) * d_j);
    }
  }

  sol.iterations = iter;
  sol.kkt_violation = gap;
  sol.bias = dual_bias(alpha, grad, labels, c);
  return sol;
}

double dual_bias(const Vector& alpha, const Vector& gradient, const std::vector<int>& labels,
                 double c_penalty, double bound_tol) {
  double upper = kInf;
  double lower = -kInf;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const int y = labels[static_cast<std::size_t>(t)];
    const double yg = y * gradient(t);
    if (alpha(t) >= c_penalty - bound_tol) {
      if (y < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha(t) <= bound_tol) {
      if (y > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(upper) && std::isfinite(lower)) {
    rho = 0.5 * (upper + lower);
  } else if (std::isfinite(upper)) {
    rho = upper;
  } else if (std::isfinite(lower)) {
    rho = lower;
  }
  return -rho;
}

CarClassifier fit_car(const ConceptSets& train, const LatentDataset& dataset,
                      const KernelSpec& kernel, const TrainConfig& cfg) {
  train.validate_against(dataset.size());
  kernel.validate();
  cfg.validate();

  std::vector<Index> rows(train.positive);
  rows.insert(rows.end(), train.negative.begin(), train.negative.end());
  std::vector<int> labels(train.positive.size(), 1);
  labels.resize(rows.size(), -1);

  const Matrix x = dataset.gather(rows);
  const Matrix gram = gram_matrix(kernel, x, x);
  const DualSolution sol = solve_svc_dual(gram, labels, cfg);

  CarClassifier clf;
  clf.concept_name = train.concept_name;
  clf.kernel = kernel;
  clf.c_penalty = cfg.c_penalty;
  clf.bias = sol.bias;
  clf.converged = sol.converged;
  clf.kkt_violation = sol.kkt_violation;
  clf.iterations = sol.iterations;

  std::vector<Eigen::Index> support;
  for (Eigen::Index t = 0; t < sol.alpha.size(); ++t) {
    if (sol.alpha(t) > 0.0) support.push_back(t);
  }
  clf.support_reps.resize(static_cast<Eigen::Index>(support.size()), x.cols());
  clf.dual_coefs.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    const auto t = support[s];
    const auto r = static_cast<Eigen::Index>(s);
    clf.support_reps.row(r) = x.row(t);
    clf.dual_coefs(r) = labels[static_cast<std::size_t>(t)] * sol.alpha(t);
  }
  return clf;
}

double decision_value(const CarClassifier& clf, const Eigen::Ref<const Vector>& h) {
  require_same_dim(clf.support_reps.cols(), h.size(), "decision_value");
  double value = clf.bias;
  for (Eigen::Index s = 0; s < clf.support_reps.rows(); ++s) {
    value += clf.dual_coefs(s) * kernel_eval(clf.kernel, h, clf.support_reps.row(s).transpose());
  }
  return value;
}

bool predict_car(const CarClassifier& clf, const Eigen::Ref<const Vector>& h) {
  return decision_value(clf, h) >= 0.0;
}

double dual_objective(const Vector& alpha_pos, const Vector& alpha_neg, const Matrix& k_pp,
                      const Matrix& k_nn, const Matrix& k_pn) {
  const auto np = alpha_pos.size();
  const auto nn = alpha_neg.size();
  if (k_pp.rows() != np || k_pp.cols() != np || k_nn.rows() != nn || k_nn.cols() != nn ||
      k_pn.rows() != np || k_pn.cols() != nn) {
    throw Error(ErrorKind::kDimensionMismatch, "kernel blocks do not match multiplier lengths");
  }
  const double linear = alpha_pos.sum() + alpha_neg.sum();
  const double quad = alpha_pos.dot(k_pp * alpha_pos) + alpha_neg.dot(k_nn * alpha_neg) -
                      2.0 * alpha_pos.dot(k_pn * alpha_neg);
  return linear - 0.5 * quad;
}

Accuracy car_accuracy(const CarClassifier& clf, const LatentDataset& dataset,
                      const ConceptSets& sets) {
  sets.validate_against(dataset.size());
  Accuracy acc;
  for (Index i : sets.positive) acc.correct += predict_car(clf, dataset.row(i)) ? 1 : 0;
  for (Index i : sets.negative) acc.correct += predict_car(clf, dataset.row(i)) ? 0 : 1;
  acc.total = sets.positive.size() + sets.negative.size();
  return acc;
}

TuneResult tune_kernel(const ConceptSets& train, const LatentDataset& dataset,
                       const std::vector<TuneCandidate>& candidates, double val_fraction,
                       std::uint64_t seed) {
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "no tuning candidates");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "val_fraction must lie in (0, 1)");
  }
  train.validate_against(dataset.size());
  const auto holdout =
      static_cast<std::size_t>(std::lround(val_fraction * static_cast<double>(train.per_side())));
  if (holdout < 1 || holdout >= train.per_side()) {
    throw Error(ErrorKind::kInsufficientExamples,
                "validation split of " + std::to_string(holdout) + " per side leaves an empty side (" +
                    std::to_string(train.per_side()) + " per side available)");
  }
  const auto [fit_sets, val_sets] = holdout_split(train, holdout, seed);

  TuneResult result;
  std::size_t best_correct = 0;
  std::size_t best = candidates.size();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    TrainConfig cfg;
    cfg.c_penalty = candidates[c].c_penalty;
    cfg.seed = seed;
    const auto clf = fit_car(fit_sets, dataset, candidates[c].kernel, cfg);
    const auto acc = car_accuracy(clf, dataset, val_sets);
    result.candidate_accuracies.push_back(acc.value());
    if (best == candidates.size() || acc.correct > best_correct) {
      best = c;
      best_correct = acc.correct;
    }
  }
  result.kernel = candidates[best].kernel;
  result.c_penalty = candidates[best].c_penalty;
  result.validation_accuracy = result.candidate_accuracies[best];
  return result;
}

}  // namespace carprobe
