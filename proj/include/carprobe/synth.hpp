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

#ifndef CARPROBE_SYNTH_HPP_
#define CARPROBE_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "carprobe/core.hpp"
#include "carprobe/net.hpp"

namespace carprobe {

struct SyntheticCluster {
  Vector center;
  int label = 0;
  std::map<std::string, bool> concepts;  // every cluster lists every concept
};

/// Gaussian clusters in latent space, each carrying a class label and a
/// fixed concept annotation.
struct SyntheticSpec {
  std::size_t dim = 2;
  std::vector<SyntheticCluster> clusters;
  double cluster_std = 0.3;
  std::size_t n_per_cluster = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Four clusters at (+-1, +-1) * scale. Class 0 is the left half-plane, class 1
/// the right one; concept "diagonal" holds on (1, 1) and (-1, -1), so the
/// classes are linearly separable while the concept sets are not.
SyntheticSpec xor_spec(double scale = 1.0, double cluster_std = 0.3,
                       std::size_t n_per_cluster = 50, std::uint64_t seed = 0);

/// Many-class geometry with varying class-concept proportions.
///
/// Class k sits at class_sep * e_k. Each class owns `clusters_per_class`
/// clusters whose concept annotations are drawn at random; concept c moves a
/// cluster along its own axis by +-concept_sep, with the sign of the positive
/// side flipped at random per class, so positives of one concept are scattered
/// over several regions of the latent space.
SyntheticSpec class_concept_spec(int n_classes, int n_concepts, std::size_t clusters_per_class,
                                 double class_sep, double concept_sep, double cluster_std,
                                 std::size_t n_per_cluster, std::uint64_t seed);

struct GroundTruthRow {
  int class_index = 0;
  std::string concept_name;
  double proportion = 0.0;  // fraction of class examples carrying the concept
};

struct SyntheticData {
  LatentDataset dataset;
  std::map<std::string, ConceptSets> concept_sets;  // balanced, as large as possible
  std::vector<GroundTruthRow> ground_truth;         // sorted by (class, concept)
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

inline SyntheticData make_xor_geometry(const SyntheticSpec& spec) { return make_synthetic(spec); }

/// Single-layer softmax head scoring each class by -|h - center_k|^2 / 2 up to
/// a shared term, with an empty feature extractor (cut index 0).
FeedforwardNet nearest_centroid_net(const std::vector<Vector>& class_centers);

/// Class centers (mean of cluster centers per label) of a spec.
std::vector<Vector> class_centers(const SyntheticSpec& spec);

/// Affine isometry h -> Q h + r with orthogonal Q.
struct Isometry {
  Matrix rotation;
  Vector translation;

  Vector apply(const Eigen::Ref<const Vector>& h) const;
  Vector apply_inverse(const Eigen::Ref<const Vector>& h) const;
  static Isometry identity(std::size_t dim);
};

/// Q from the QR factorization of a seeded Gaussian matrix (column signs fixed
/// by diag(R) > 0), r seeded standard normal.
Isometry random_isometry(std::size_t dim, std::uint64_t seed);

/// Maps every representation through the isometry; ids, labels and concept
/// annotations are kept.
LatentDataset apply_isometry(const Isometry& iso, const LatentDataset& dataset);

}  // namespace carprobe

#endif  // CARPROBE_SYNTH_HPP_
