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

#include "carprobe/linear_probe.hpp"

#include <cmath>

#include "carprobe/error.hpp"

namespace carprobe {

namespace {

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m))
double logistic_slope(double margin) {
  if (margin > 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

}  // namespace

CavClassifier fit_cav(const ConceptSets& train, const LatentDataset& dataset,
                      const CavConfig& cfg) {
  train.validate_against(dataset.size());
  if (!(cfg.learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "learning rate must be positive");
  }
  if (cfg.epochs == 0) throw Error(ErrorKind::kInvalidArgument, "epochs must be at least 1");

  std::vector<Index> rows(train.positive);
  rows.insert(rows.end(), train.negative.begin(), train.negative.end());
  const Matrix x = dataset.gather(rows);
  Vector y = Vector::Constant(x.rows(), -1.0);
  y.head(static_cast<Eigen::Index>(train.positive.size())).setOnes();
  const double n = static_cast<double>(x.rows());

  CavClassifier clf;
  clf.concept_name = train.concept_name;
  clf.weights = Vector::Zero(x.cols());
  clf.bias = 0.0;

  auto mean_loss = [&](const Vector& w, double b) {
    const Vector margins = (y.array() * ((x * w).array() + b)).matrix();
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) total += logistic_loss(margins(i));
    return total / n;
  };

  double loss = mean_loss(clf.weights, clf.bias);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Vector scores = (x * clf.weights).array() + clf.bias;
    Vector coef(x.rows());
    for (Eigen::Index i = 0; i < coef.size(); ++i) {
      coef(i) = y(i) * logistic_slope(y(i) * scores(i)) / n;
    }
    clf.weights -= cfg.learning_rate * (x.transpose() * coef);
    clf.bias -= cfg.learning_rate * coef.sum();

    const double next = mean_loss(clf.weights, clf.bias);
    clf.train_log.losses.push_back(next);
    clf.train_log.epochs_run = epoch + 1;
    const double change = std::abs(loss - next);
    loss = next;
    if (cfg.tolerance > 0.0 && change < cfg.tolerance) break;
  }
  clf.train_log.final_loss = loss;
  return clf;
}

bool cav_predict(const CavClassifier& clf, const Eigen::Ref<const Vector>& h) {
  require_same_dim(clf.weights.size(), h.size(), "cav_predict");
  return clf.weights.dot(h) + clf.bias >= 0.0;
}

double cav_accuracy(const CavClassifier& clf, const LatentDataset& dataset,
                    const ConceptSets& sets) {
  sets.validate_against(dataset.size());
  std::size_t correct = 0;
  for (Index i : sets.positive) correct += cav_predict(clf, dataset.row(i)) ? 1 : 0;
  for (Index i : sets.negative) correct += cav_predict(clf, dataset.row(i)) ? 0 : 1;
  return static_cast<double>(correct) /
         static_cast<double>(sets.positive.size() + sets.negative.size());
}

}  // namespace carprobe
