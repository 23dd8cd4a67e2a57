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

#include "carprobe/scores.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_set>

#include "carprobe/error.hpp"
#include "carprobe/random.hpp"

namespace carprobe {

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kTcarClass: return "tcar_class";
    case ScoreKind::kTcarConcept: return "tcar_concept";
    case ScoreKind::kTcav: return "tcav";
  }
  return "tcar_class";
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

namespace {

std::vector<Index> nonempty_class(const LatentDataset& dataset, int k) {
  auto rows = dataset.class_indices(k);
  if (rows.empty()) {
    throw Error(ErrorKind::kEmptyClass, "class " + std::to_string(k) + " has no examples");
  }
  return rows;
}

ScoreReport make_report(ScoreKind kind, std::vector<std::string> concepts,
                        std::optional<int> k, std::size_t num, std::size_t den,
                        const LatentDataset& dataset) {
  ScoreReport r;
  r.kind = kind;
  r.concepts = std::move(concepts);
  r.class_index = k;
  r.numerator = num;
  r.denominator = den;
  r.degenerate = den == 0;
  r.value = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  r.dataset_fingerprint = fingerprint_hex(dataset.fingerprint());
  return r;
}

Vector latent_of(const FeedforwardNet& net, const Eigen::Ref<const Vector>& x, RowSpace space) {
  return space == RowSpace::kInput ? net.features(x) : Vector(x);
}

}  // namespace

ScoreReport tcar_class_concept(const CarClassifier& clf, const LatentDataset& dataset, int k) {
  require_same_dim(static_cast<long>(clf.dim()), static_cast<long>(dataset.dim()),
                   "tcar_class_concept");
  const auto rows = nonempty_class(dataset, k);
  std::size_t inside = 0;
  for (Index i : rows) inside += predict_car(clf, dataset.row(i)) ? 1 : 0;
  return make_report(ScoreKind::kTcarClass, {clf.concept_name}, k, inside, rows.size(), dataset);
}

ScoreReport tcar_concept_concept(const CarClassifier& clf1, const CarClassifier& clf2,
                                 const LatentDataset& dataset) {
  require_same_dim(static_cast<long>(clf1.dim()), static_cast<long>(dataset.dim()),
                   "tcar_concept_concept");
  require_same_dim(static_cast<long>(clf2.dim()), static_cast<long>(dataset.dim()),
                   "tcar_concept_concept");
  std::size_t both = 0;
  std::size_t either = 0;
  for (Index i = 0; i < dataset.size(); ++i) {
    const Vector h = dataset.row(i);
    const bool in1 = predict_car(clf1, h);
    const bool in2 = predict_car(clf2, h);
    both += (in1 && in2) ? 1 : 0;
    either += (in1 || in2) ? 1 : 0;
  }
  // Concept names are stored sorted so the report itself is symmetric.
  std::vector<std::string> names{clf1.concept_name, clf2.concept_name};
  std::sort(names.begin(), names.end());
  return make_report(ScoreKind::kTcarConcept, std::move(names), std::nullopt, both, either,
                     dataset);
}

double cav_sensitivity(const CavClassifier& cav, const FeedforwardNet& net,
                       const Eigen::Ref<const Vector>& x, int k, RowSpace space) {
  const Vector h = latent_of(net, x, space);
  require_same_dim(static_cast<long>(cav.dim()), h.size(), "cav_sensitivity");
  return cav.weights.dot(net.latent_gradient(h, k));
}

double density_sensitivity(const ConceptDensity& d, const FeedforwardNet& net,
                           const Eigen::Ref<const Vector>& x, int k, RowSpace space) {
  const Vector h = latent_of(net, x, space);
  return density_grad(d, h).dot(net.latent_gradient(h, k));
}

ScoreReport tcav_score(const CavClassifier& cav, const FeedforwardNet& net,
                       const LatentDataset& dataset, int k, RowSpace space) {
  const auto rows = nonempty_class(dataset, k);
  std::size_t positive = 0;
  for (Index i : rows) positive += cav_sensitivity(cav, net, dataset.row(i), k, space) > 0.0 ? 1 : 0;
  return make_report(ScoreKind::kTcav, {cav.concept_name}, k, positive, rows.size(), dataset);
}

PermutationResult permutation_test(const ConceptSets& train, const LatentDataset& dataset,
                                   const KernelSpec& kernel, const TrainConfig& cfg,
                                   const ConceptSets& holdout, std::size_t n_perm,
                                   std::uint64_t seed, unsigned threads) {
  if (n_perm == 0) {
    throw Error(ErrorKind::kInsufficientExamples, "permutation test needs at least one permutation");
  }
  train.validate_against(dataset.size());
  holdout.validate_against(dataset.size());
  {
    std::unordered_set<Index> seen(train.positive.begin(), train.positive.end());
    seen.insert(train.negative.begin(), train.negative.end());
    for (auto side : {&holdout.positive, &holdout.negative}) {
      for (Index i : *side) {
        if (seen.count(i)) {
          throw Error(ErrorKind::kInvalidArgument, "train and holdout sets share row " +
                                                       std::to_string(i));
        }
      }
    }
  }

  const auto observed = car_accuracy(fit_car(train, dataset, kernel, cfg), dataset, holdout);

  Rng master(seed);
  std::vector<std::uint64_t> seeds(n_perm);
  for (auto& s : seeds) s = master.fork_seed();

  std::vector<Accuracy> permuted(n_perm);
  auto shuffle_sides = [](const ConceptSets& sets, Rng& rng) {
    std::vector<Index> pool(sets.positive);
    pool.insert(pool.end(), sets.negative.begin(), sets.negative.end());
    rng.shuffle(pool);
    const auto half = static_cast<std::ptrdiff_t>(sets.per_side());
    return ConceptSets{sets.concept_name, {pool.begin(), pool.begin() + half},
                       {pool.begin() + half, pool.end()}};
  };
  auto run_one = [&](std::size_t p) {
    Rng rng(seeds[p]);
    const ConceptSets shuffled_train = shuffle_sides(train, rng);
    const ConceptSets shuffled_holdout = shuffle_sides(holdout, rng);
    permuted[p] = car_accuracy(fit_car(shuffled_train, dataset, kernel, cfg), dataset, shuffled_holdout);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_perm)));
  if (workers == 1) {
    for (std::size_t p = 0; p < n_perm; ++p) run_one(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t p = next++; p < n_perm; p = next++) run_one(p);
      });
    }
    for (auto& t : pool) t.join();
  }

  PermutationResult result;
  result.observed_accuracy = observed.value();
  std::size_t at_least = 0;
  for (const auto& acc : permuted) {
    result.permuted_accuracies.push_back(acc.value());
    at_least += acc.correct >= observed.correct ? 1 : 0;
  }
  result.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + n_perm);
  return result;
}

double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "pearson_r inputs differ in length");
  }
  if (a.size() < 2) throw Error(ErrorKind::kInsufficientExamples, "pearson_r needs >= 2 points");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw Error(ErrorKind::kDegenerateData, "pearson_r input is constant");
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

}  // namespace carprobe
