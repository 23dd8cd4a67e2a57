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

#include "carprobe/io.hpp"

#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "carprobe/synth.hpp"
#include "test_support.hpp"

namespace carprobe::io {
namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("carprobe_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

constexpr const char* kThreeRows =
    "# format: latents 1\n"
    "id,label,h0,h1\n"
    "a,0,1.5,-2\n"
    "b,1,3e-2,4E+1\n"
    "c,0,0,0.25\n";

TEST(Latents, ParsesWellFormedFile) {
  const auto d = parse_latents_csv(kThreeRows);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.labels(), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(d.reps()(1, 0), 0.03);
  EXPECT_EQ(d.reps()(1, 1), 40.0);
}

TEST(Latents, UnlabeledHeader) {
  const auto d = parse_latents_csv("# format: latents 1\nid,h0\nx,1\ny,2\n");
  EXPECT_FALSE(d.has_labels());
  EXPECT_EQ(d.dim(), 1u);
}

TEST(Latents, RaggedRowNamesTheRow) {
  try {
    parse_latents_csv("# format: latents 1\nid,h0,h1\na,1,2\nb,3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRaggedRows);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(Latents, NonFiniteAndParseErrors) {
  EXPECT_CAR_ERROR(parse_latents_csv("# format: latents 1\nid,h0\na,NaN\n"), ErrorKind::kNonFiniteValue);
  EXPECT_CAR_ERROR(parse_latents_csv("# format: latents 1\nid,h0\na,inf\n"), ErrorKind::kNonFiniteValue);
  try {
    parse_latents_csv("# format: latents 1\nid,h0,h1\na,1,2x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3, column 3"), std::string::npos) << e.what();
  }
}

TEST(Latents, HeaderAndVersionChecks) {
  EXPECT_CAR_ERROR(parse_latents_csv("id,h0\na,1\n"), ErrorKind::kSchemaError);
  try {
    parse_latents_csv("# format: latents 2\nid,h0\na,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kVersionMismatch);
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("expected 1"), std::string::npos);
  }
  EXPECT_CAR_ERROR(parse_latents_csv("# format: latents 1\nid,h1\na,1\n"), ErrorKind::kSchemaError);
}

TEST_F(TempDir, LatentsRoundTripWithTruth) {
  const auto data = make_synthetic(xor_spec(1.0, 0.3, 5, 2));
  const auto path = dir_ / "latents.csv";
  save_latents(path, data.dataset);
  EXPECT_TRUE(fs::exists(dir_ / "latents.truth.json"));
  const auto loaded = load_latents(path);
  EXPECT_EQ(loaded.reps(), data.dataset.reps());
  EXPECT_EQ(loaded.ids(), data.dataset.ids());
  EXPECT_EQ(loaded.labels(), data.dataset.labels());
  EXPECT_EQ(loaded.concept_truth(), data.dataset.concept_truth());
  EXPECT_EQ(latents_to_csv(loaded), latents_to_csv(data.dataset));
}

Json concepts_doc(std::vector<std::string> pos, std::vector<std::string> neg) {
  return Json{{"format", "concept_sets"},
              {"version", 1},
              {"concepts", {{"stripes", {{"positive", pos}, {"negative", neg}}}}}};
}

TEST(Concepts, ParseAndBind) {
  const auto d = parse_latents_csv(
      "# format: latents 1\nid,h0\na,1\nb,2\nc,3\nd,4\n");
  const auto file = parse_concepts(concepts_doc({"a", "b"}, {"c", "d"}));
  const auto bound = bind_concepts(file, d);
  const auto& s = bound.at("stripes");
  EXPECT_EQ(s.positive, (std::vector<Index>{0, 1}));
  EXPECT_EQ(s.negative, (std::vector<Index>{2, 3}));
  EXPECT_EQ(parse_concepts(concepts_to_json(bound, d)).at("stripes").positive, file.at("stripes").positive);
}

TEST(Concepts, Errors) {
  EXPECT_CAR_ERROR(parse_concepts(concepts_doc({"a", "b", "e"}, {"c", "d"})), ErrorKind::kUnbalancedSets);
  EXPECT_CAR_ERROR(parse_concepts(concepts_doc({"a", "b"}, {"b", "d"})), ErrorKind::kDuplicateId);
  const auto d = parse_latents_csv("# format: latents 1\nid,h0\na,1\nb,2\n");
  EXPECT_CAR_ERROR(bind_concepts(parse_concepts(concepts_doc({"a"}, {"zz"})), d), ErrorKind::kUnknownId);
  Json bad = concepts_doc({"a"}, {"b"});
  bad["version"] = 7;
  EXPECT_CAR_ERROR(parse_concepts(bad), ErrorKind::kVersionMismatch);
}

TEST_F(TempDir, MissingFileIsIoError) {
  EXPECT_CAR_ERROR(load_concepts(dir_ / "absent.json"), ErrorKind::kIoError);
}

Vector probe(Rng& rng, Eigen::Index d) { return testing::gaussian_vector(rng, d, 2.0); }

TEST(RoundTrip, CarClassifier) {
  const auto data = make_synthetic(xor_spec(1.0, 0.3, 20, 4));
  TrainConfig cfg;
  const auto clf = fit_car(data.concept_sets.at("diagonal"), data.dataset, KernelSpec::rbf(0.9), cfg);
  const auto text = dump_json(to_json(clf));
  const auto back = car_from_json(parse_json(text));
  EXPECT_EQ(dump_json(to_json(back)), text);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Vector h = probe(rng, 2);
    EXPECT_NEAR(decision_value(back, h), decision_value(clf, h), 1e-12);
    EXPECT_EQ(predict_car(back, h), predict_car(clf, h));
  }
  EXPECT_EQ(back.converged, clf.converged);
}

TEST(RoundTrip, LinearKernelOmitsGamma) {
  const Json j = to_json(KernelSpec::linear());
  EXPECT_FALSE(j.contains("gamma"));
  EXPECT_EQ(kernel_from_json(j), KernelSpec::linear());
  EXPECT_EQ(kernel_from_json(to_json(KernelSpec::rbf(0.125))), KernelSpec::rbf(0.125));
  EXPECT_CAR_ERROR(kernel_from_json(Json{{"kind", "matern"}}), ErrorKind::kSchemaError);
}

TEST(RoundTrip, CavDensityAndNet) {
  Rng rng(2);
  CavClassifier cav;
  cav.concept_name = "c";
  cav.weights = testing::gaussian_vector(rng, 3);
  cav.bias = 0.1 / 3.0;
  const auto cav2 = cav_from_json(parse_json(dump_json(to_json(cav))));
  EXPECT_EQ(cav2.weights, cav.weights);
  EXPECT_EQ(cav2.bias, cav.bias);

  const ConceptDensity d("c", KernelSpec::rbf(0.7), testing::gaussian_matrix(rng, 4, 3),
                         testing::gaussian_matrix(rng, 4, 3));
  const auto d2 = density_from_json(parse_json(dump_json(to_json(d))));
  for (int t = 0; t < 100; ++t) {
    const Vector h = probe(rng, 3);
    EXPECT_NEAR(density_eval(d2, h), density_eval(d, h), 1e-12);
  }

  auto net = testing::random_net(rng, {3, 4, 2}, Activation::kLeakyRelu, 1);
  const auto net2 = net_from_json(parse_json(dump_json(to_json(net))));
  EXPECT_EQ(net2.cut_index(), 1u);
  for (int t = 0; t < 100; ++t) {
    const Vector x = probe(rng, 3);
    EXPECT_LT((net2.forward(x) - net.forward(x)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Json, TruncatedAndVersionErrors) {
  const auto text = dump_json(to_json(CavClassifier{"c", Vector::Ones(2), 0.0, {}}));
  EXPECT_CAR_ERROR(parse_json(text.substr(0, text.size() / 2)), ErrorKind::kSchemaError);
  Json j = parse_json(text);
  j["version"] = 2;
  try {
    cav_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kVersionMismatch);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("version 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("expected 1"), std::string::npos) << msg;
  }
  j["version"] = 1;
  j.erase("weights");
  EXPECT_CAR_ERROR(cav_from_json(j), ErrorKind::kSchemaError);
  EXPECT_CAR_ERROR(car_from_json(parse_json("{\"format\":\"cav_classifier\",\"version\":1}")),
                   ErrorKind::kSchemaError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    const auto s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
}

TEST(Reports, DeterministicSerializations) {
  ScoreReport r;
  r.kind = ScoreKind::kTcarConcept;
  r.concepts = {"a", "b"};
  r.value = 0.5;
  r.numerator = 2;
  r.denominator = 4;
  r.dataset_fingerprint = "00ff";
  const auto jsonl = scores_to_jsonl({r, r});
  EXPECT_EQ(jsonl, scores_to_jsonl({r, r}));
  EXPECT_EQ(score_from_json(parse_json(jsonl.substr(0, jsonl.find('\n')))).value, 0.5);
  EXPECT_EQ(scores_to_csv({r}),
            "# format: scores 1\nconcept,class,kind,value,numerator,denominator\na&b,,tcar_concept,0.5,2,4\n");
}

TEST(Reports, GroundTruthRoundTrip) {
  const auto data = make_synthetic(class_concept_spec(3, 2, 2, 3.0, 1.0, 0.3, 7, 1));
  const auto rows = parse_ground_truth_csv(ground_truth_to_csv(data.ground_truth));
  ASSERT_EQ(rows.size(), data.ground_truth.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].class_index, data.ground_truth[i].class_index);
    EXPECT_EQ(rows[i].concept_name, data.ground_truth[i].concept_name);
    EXPECT_EQ(rows[i].proportion, data.ground_truth[i].proportion);
  }
}

TEST(Reports, AttributionRecords) {
  AttributionRecord rec;
  rec.example_id = "ex1";
  rec.concept_name = "c";
  rec.gamma = 0.5;
  rec.baseline_kind = "zeros";
  rec.result.scores = Vector(2);
  rec.result.scores << 0.25, -1;
  rec.result.steps = 50;
  const Json j = to_json(rec);
  EXPECT_EQ(j["example_id"], "ex1");
  EXPECT_EQ(j["steps"], 50);
  EXPECT_EQ(j["baseline_kind"], "zeros");
  EXPECT_EQ(attributions_to_csv({rec}), "# format: attributions 1\nexample_id,concept,a0,a1\nex1,c,0.25,-1\n");
}

}  // namespace
}  // namespace carprobe::io
