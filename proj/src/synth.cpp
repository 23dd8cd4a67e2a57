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

#include "carprobe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "carprobe/error.hpp"
#include "carprobe/random.hpp"

namespace carprobe {

void SyntheticSpec::validate() const {
  if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "synthetic dimension must be >= 1");
  if (clusters.empty()) throw Error(ErrorKind::kInvalidArgument, "synthetic spec has no clusters");
  if (n_per_cluster < 1) throw Error(ErrorKind::kInvalidArgument, "n_per_cluster must be >= 1");
  if (!(cluster_std >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "cluster_std must be >= 0");
  const auto& names = clusters.front().concepts;
  for (const auto& cluster : clusters) {
    require_same_dim(static_cast<long>(dim), cluster.center.size(), "synthetic cluster center");
    if (cluster.label < 0) throw Error(ErrorKind::kInvalidArgument, "cluster label must be >= 0");
    if (cluster.concepts.size() != names.size() ||
        !std::equal(names.begin(), names.end(), cluster.concepts.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw Error(ErrorKind::kInvalidArgument, "clusters must annotate the same concepts");
    }
  }
}

SyntheticSpec xor_spec(double scale, double cluster_std, std::size_t n_per_cluster,
                       std::uint64_t seed) {
  SyntheticSpec spec;
  spec.dim = 2;
  spec.cluster_std = cluster_std;
  spec.n_per_cluster = n_per_cluster;
  spec.seed = seed;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      SyntheticCluster c;
      c.center = Vector(2);
      c.center << sx * scale, sy * scale;
      c.label = sx < 0 ? 0 : 1;
      c.concepts["diagonal"] = sx * sy > 0;
      spec.clusters.push_back(std::move(c));
    }
  }
  return spec;
}

SyntheticSpec class_concept_spec(int n_classes, int n_concepts, std::size_t clusters_per_class,
                                 double class_sep, double concept_sep, double cluster_std,
                                 std::size_t n_per_cluster, std::uint64_t seed) {
  if (n_classes < 1 || n_concepts < 1 || clusters_per_class < 1) {
    throw Error(ErrorKind::kInvalidArgument, "class_concept_spec needs positive counts");
  }
  SyntheticSpec spec;
  spec.dim = static_cast<std::size_t>(n_classes + n_concepts);
  spec.cluster_std = cluster_std;
  spec.n_per_cluster = n_per_cluster;
  spec.seed = seed;
  Rng rng(seed ^ 0x5eedc1a55ULL);
  for (int k = 0; k < n_classes; ++k) {
    std::vector<double> prevalence(static_cast<std::size_t>(n_concepts));
    std::vector<double> sign(static_cast<std::size_t>(n_concepts));
    for (int c = 0; c < n_concepts; ++c) {
      prevalence[static_cast<std::size_t>(c)] = rng.uniform();
      sign[static_cast<std::size_t>(c)] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
    for (std::size_t j = 0; j < clusters_per_class; ++j) {
      SyntheticCluster cluster;
      cluster.label = k;
      cluster.center = Vector::Zero(static_cast<Eigen::Index>(spec.dim));
      cluster.center(k) = class_sep;
      for (int c = 0; c < n_concepts; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const bool present = rng.uniform() < prevalence[ci];
        char name[32];
        std::snprintf(name, sizeof(name), "concept%d", c);
        cluster.concepts[name] = present;
        cluster.center(n_classes + c) = concept_sep * sign[ci] * (present ? 1.0 : -1.0);
      }
      spec.clusters.push_back(std::move(cluster));
    }
  }
  return spec;
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.clusters.size() * spec.n_per_cluster;
  Rng rng(spec.seed);

  std::vector<std::string> ids;
  ids.reserve(n);
  Matrix reps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dim));
  std::vector<int> labels;
  LatentDataset::ConceptTruth truth;
  for (const auto& [name, _] : spec.clusters.front().concepts) truth[name].reserve(n);

  std::size_t row = 0;
  for (const auto& cluster : spec.clusters) {
    for (std::size_t i = 0; i < spec.n_per_cluster; ++i, ++row) {
      char id[32];
      std::snprintf(id, sizeof(id), "ex%06zu", row);
      ids.emplace_back(id);
      for (std::size_t d = 0; d < spec.dim; ++d) {
        const auto di = static_cast<Eigen::Index>(d);
        reps(static_cast<Eigen::Index>(row), di) = cluster.center(di) + spec.cluster_std * rng.normal();
      }
      labels.push_back(cluster.label);
      for (const auto& [name, present] : cluster.concepts) truth[name].push_back(present);
    }
  }

  std::vector<GroundTruthRow> table;
  std::set<int> classes(labels.begin(), labels.end());
  for (int k : classes) {
    for (const auto& [name, flags] : truth) {
      std::size_t in_class = 0;
      std::size_t with_concept = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != k) continue;
        ++in_class;
        with_concept += flags[i] ? 1 : 0;
      }
      table.push_back({k, name, static_cast<double>(with_concept) / static_cast<double>(in_class)});
    }
  }

  LatentDataset dataset(std::move(ids), std::move(reps), std::move(labels), std::move(truth));
  std::map<std::string, ConceptSets> sets;
  for (const auto& [name, flags] : dataset.concept_truth()) {
    const auto pos = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    const std::size_t per_side = std::min(pos, flags.size() - pos);
    if (per_side == 0) continue;
    sets.emplace(name, balanced_sample(dataset, name, per_side, spec.seed));
  }
  return SyntheticData{std::move(dataset), std::move(sets), std::move(table)};
}

std::vector<Vector> class_centers(const SyntheticSpec& spec) {
  spec.validate();
  int n_classes = 0;
  for (const auto& c : spec.clusters) n_classes = std::max(n_classes, c.label + 1);
  std::vector<Vector> centers(static_cast<std::size_t>(n_classes),
                              Vector::Zero(static_cast<Eigen::Index>(spec.dim)));
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (const auto& c : spec.clusters) {
    centers[static_cast<std::size_t>(c.label)] += c.center;
    counts[static_cast<std::size_t>(c.label)] += 1.0;
  }
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (counts[k] > 0.0) centers[k] /= counts[k];
  }
  return centers;
}

FeedforwardNet nearest_centroid_net(const std::vector<Vector>& class_centers) {
  if (class_centers.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "nearest_centroid_net needs at least two classes");
  }
  const auto dim = class_centers.front().size();
  DenseLayer layer;
  layer.weights.resize(static_cast<Eigen::Index>(class_centers.size()), dim);
  layer.bias.resize(static_cast<Eigen::Index>(class_centers.size()));
  for (std::size_t k = 0; k < class_centers.size(); ++k) {
    require_same_dim(dim, class_centers[k].size(), "nearest_centroid_net");
    const auto r = static_cast<Eigen::Index>(k);
    layer.weights.row(r) = class_centers[k].transpose();
    layer.bias(r) = -0.5 * class_centers[k].squaredNorm();
  }
  layer.activation = Activation::kIdentity;
  return FeedforwardNet({std::move(layer)}, 0);
}

Vector Isometry::apply(const Eigen::Ref<const Vector>& h) const {
  require_same_dim(rotation.cols(), h.size(), "Isometry::apply");
  return rotation * h + translation;
}

Vector Isometry::apply_inverse(const Eigen::Ref<const Vector>& h) const {
  require_same_dim(rotation.rows(), h.size(), "Isometry::apply_inverse");
  return rotation.transpose() * (h - translation);
}

Isometry Isometry::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return {Matrix::Identity(d, d), Vector::Zero(d)};
}

Isometry random_isometry(std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "isometry dimension must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim);
  Rng rng(seed);
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Vector t(d);
  for (Eigen::Index i = 0; i < d; ++i) t(i) = rng.normal();
  return {std::move(q), std::move(t)};
}

LatentDataset apply_isometry(const Isometry& iso, const LatentDataset& dataset) {
  require_same_dim(iso.rotation.cols(), static_cast<long>(dataset.dim()), "apply_isometry");
  Matrix reps = (dataset.reps() * iso.rotation.transpose()).rowwise() + iso.translation.transpose();
  std::optional<std::vector<int>> labels;
  if (dataset.has_labels()) labels = dataset.labels();
  return LatentDataset(dataset.ids(), std::move(reps), std::move(labels), dataset.concept_truth());
}

}  // namespace carprobe
