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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "carprobe/io.hpp"

namespace {

namespace fs = std::filesystem;
using carprobe::io::Json;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  static fs::path root() {
    return fs::temp_directory_path() / ("carprobe_cli_test_" + std::to_string(::getpid()));
  }
  static fs::path xor_dir() { return root() / "xor"; }
  static fs::path cls_dir() { return root() / "classes"; }

  static Result run(const std::string& args, const std::string& env = "") {
    const auto out = root() / "stdout.txt";
    const auto err = root() / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + CAR_PROBE_EXE + std::string(" ") + args + " > " +
                            out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(out), slurp(err)};
  }

  static void SetUpTestSuite() {
    fs::remove_all(root());
    fs::create_directories(root());
    ASSERT_EQ(run("synth --kind xor --labels quadrant --n-per-cluster 100 --seed 3 --out " + xor_dir().string()).code, 0);
    ASSERT_EQ(run("synth --kind classes --classes 4 --concepts 3 --n-per-cluster 10 --seed 4 --out " +
                  cls_dir().string()).code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(root()); }

  static std::string data_flags(const fs::path& dir) {
    return "--latents " + (dir / "latents.csv").string() + " --concepts " + (dir / "concepts.json").string();
  }
  static fs::path out(const std::string& name) { return root() / name; }
};

TEST_F(Cli, FitXorReportsHoldoutAccuracy) {
  const auto r = run("fit " + data_flags(xor_dir()) + " --holdout 50 --seed 1 --out " + out("fit").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("holdout accuracy diagonal: ");
  ASSERT_NE(pos, std::string::npos) << r.out;
  EXPECT_GE(std::stod(r.out.substr(pos + 27)), 0.95) << r.out;
  EXPECT_TRUE(fs::exists(out("fit") / "car_diagonal.json"));
}

TEST_F(Cli, MissingConceptsFileNamesPath) {
  const auto missing = (root() / "nope.json").string();
  const auto r = run("fit --latents " + (xor_dir() / "latents.csv").string() + " --concepts " + missing +
                     " --out " + out("missing").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST_F(Cli, GammaScaleIsResolvedInManifest) {
  ASSERT_EQ(run("fit " + data_flags(xor_dir()) + " --gamma scale --out " + out("scale").string()).code, 0);
  const Json m = carprobe::io::load_json(out("scale") / "manifest.json");
  const auto ds = carprobe::io::load_latents(xor_dir() / "latents.csv");
  EXPECT_EQ(m["config"]["kernel"]["gamma_requested"], "scale");
  EXPECT_EQ(m["config"]["kernel"]["gamma"].get<double>(), carprobe::default_gamma(ds.reps()));

  ASSERT_EQ(run("fit " + data_flags(xor_dir()) + " --gamma 0.75 --out " + out("value").string()).code, 0);
  EXPECT_EQ(carprobe::io::load_json(out("value") / "manifest.json")["config"]["kernel"]["gamma"], 0.75);
  EXPECT_EQ(run("fit " + data_flags(xor_dir()) + " --gamma tune --out " + out("bad_gamma").string()).code, 2);
}

TEST_F(Cli, ManifestListsEveryOutput) {
  ASSERT_EQ(run("fit " + data_flags(cls_dir()) + " --seed 2 --out " + out("listed").string()).code, 0);
  const Json m = carprobe::io::load_json(out("listed") / "manifest.json");
  EXPECT_EQ(m["format"], "run_manifest");
  EXPECT_EQ(m["seeds"]["seed"]["value"], 2);
  EXPECT_EQ(m["seeds"]["seed"]["source"], "flag");
  EXPECT_TRUE(m["inputs"].contains("latents"));
  EXPECT_TRUE(m["timing"].contains("wall_seconds"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out("listed"))) {
    const auto name = e.path().filename().string();
    if (name == "manifest.json") continue;
    ++files;
    ASSERT_TRUE(m["outputs"].contains(name)) << name;
    EXPECT_EQ(carprobe::io::load_json(e.path())["manifest"], "manifest.json");
  }
  EXPECT_EQ(files, m["outputs"].size());
}

TEST_F(Cli, SeedFromEnvironment) {
  ASSERT_EQ(run("fit " + data_flags(cls_dir()) + " --out " + out("env").string(), "CAR_PROBE_SEED=42").code, 0);
  const Json m = carprobe::io::load_json(out("env") / "manifest.json");
  EXPECT_EQ(m["seeds"]["seed"]["value"], 42);
  EXPECT_EQ(m["seeds"]["seed"]["source"], "env");
  EXPECT_EQ(run("fit " + data_flags(cls_dir()) + " --out " + out("env_bad").string(), "CAR_PROBE_SEED=x").code, 2);
}

TEST_F(Cli, NonConvergenceExitsThreeAndKeepsArtifact) {
  const auto r = run("fit " + data_flags(xor_dir()) + " --kernel linear --c-penalty 100 --kkt-tol 1e-12 --max-passes 1 --out " +
                     out("nc").string());
  EXPECT_EQ(r.code, 3) << r.err;
  ASSERT_TRUE(fs::exists(out("nc") / "car_diagonal.json"));
  EXPECT_EQ(carprobe::io::load_json(out("nc") / "car_diagonal.json")["solver"]["converged"], false);
  EXPECT_NE(r.err.find("did not converge"), std::string::npos);
}

TEST_F(Cli, TcarByClassMatchesTruthOnXor) {
  ASSERT_EQ(run("fit " + data_flags(xor_dir()) + " --seed 5 --out " + out("xor_fit").string()).code, 0);
  const auto r = run("tcar --latents " + (xor_dir() / "latents.csv").string() + " --car " +
                     (out("xor_fit") / "car_diagonal.json").string() + " --by-class --truth " +
                     (xor_dir() / "ground_truth.csv").string() + " --out " + out("tcar").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const Json eval = carprobe::io::load_json(out("tcar") / "tcar_eval.json");
  EXPECT_GE(eval["pearson_r"].get<double>(), 0.95);
  EXPECT_EQ(eval["pairs"], 4);
  EXPECT_NE(r.out.find("r(TCAR, TrueProp) = "), std::string::npos);
}

TEST_F(Cli, TcarPairsAndDimensionMismatch) {
  ASSERT_EQ(run("fit " + data_flags(cls_dir()) + " --out " + out("cls_fit").string()).code, 0);
  const auto r = run("tcar --latents " + (cls_dir() / "latents.csv").string() + " --car " +
                     (out("cls_fit") / "car_concept0.json").string() + " --car " +
                     (out("cls_fit") / "car_concept1.json").string() + " --pair --out " + out("pair").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = slurp(out("pair") / "tcar_scores.jsonl");
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 1);

  // A 2-d classifier against 7-d latents.
  const auto bad = run("tcar --latents " + (cls_dir() / "latents.csv").string() + " --car " +
                       (out("xor_fit2") / "car_diagonal.json").string() + " --by-class --out " + out("bad").string());
  EXPECT_EQ(bad.code, 2);  // missing file
  ASSERT_EQ(run("fit " + data_flags(xor_dir()) + " --out " + out("xor_fit2").string()).code, 0);
  const auto mismatch = run("tcar --latents " + (cls_dir() / "latents.csv").string() + " --car " +
                            (out("xor_fit2") / "car_diagonal.json").string() + " --by-class --out " +
                            out("bad").string());
  EXPECT_EQ(mismatch.code, 4) << mismatch.err;
  EXPECT_NE(mismatch.err.find("DimensionMismatch"), std::string::npos);
}

TEST_F(Cli, VersionMismatchIsIncompatible) {
  ASSERT_EQ(run("fit " + data_flags(xor_dir()) + " --out " + out("ver_fit").string()).code, 0);
  Json doc = carprobe::io::load_json(out("ver_fit") / "car_diagonal.json");
  doc["version"] = 2;
  carprobe::io::save_json(out("ver_fit") / "car_v2.json", doc);
  const auto r = run("tcar --latents " + (xor_dir() / "latents.csv").string() + " --car " +
                     (out("ver_fit") / "car_v2.json").string() + " --by-class --out " + out("ver").string());
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("version 2"), std::string::npos) << r.err;
}

TEST_F(Cli, PermTestSeparablePrintsMinimumP) {
  const auto r = run("perm-test " + data_flags(xor_dir()) + " --holdout 40 --n-perm 100 --seed 6 --out " +
                     out("perm").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p-value diagonal: 0.009900990099009901"), std::string::npos) << r.out;
  const Json j = carprobe::io::load_json(out("perm") / "perm_diagonal.json");
  EXPECT_EQ(j["permuted_accuracies"].size(), 100u);
  EXPECT_EQ(run("perm-test " + data_flags(xor_dir()) + " --holdout 40 --n-perm 0 --out " + out("perm0").string()).code, 2);
}

TEST_F(Cli, AttributeAtBaselineIsAllZero) {
  std::ofstream(root() / "zeros.csv") << "# format: latents 1\nid,h0,h1\nz0,0,0\nz1,0,0\n";
  const auto r = run("attribute " + data_flags(xor_dir()) + " --net " + (xor_dir() / "net.json").string() +
                     " --inputs " + (root() / "zeros.csv").string() + " --baseline zeros --out " + out("attr").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out("attr") / "attributions.csv"),
            "# format: attributions 1\n# manifest: manifest.json\nexample_id,concept,a0,a1\n"
            "z0,diagonal,0,0\nz1,diagonal,0,0\n");
}

TEST_F(Cli, AttributeBaselineOptions) {
  const auto base = "attribute " + data_flags(xor_dir()) + " --net " + (xor_dir() / "net.json").string() +
                    " --id ex000000 --steps 100 ";
  EXPECT_EQ(run(base + "--baseline mean --out " + out("attr_mean").string()).code, 0);
  EXPECT_EQ(run(base + "--baseline blur:1 --grid 1x2 --out " + out("attr_blur").string()).code, 0);
  EXPECT_EQ(run(base + "--baseline blur:1 --out " + out("attr_noshape").string()).code, 2);
  EXPECT_EQ(run(base + "--baseline blur:1 --grid 3x3 --out " + out("attr_badgrid").string()).code, 4);
  EXPECT_EQ(run(base + "--baseline median --out " + out("attr_bad").string()).code, 2);
  std::ofstream(root() / "b.csv") << "# format: latents 1\nid,h0,h1\nb,0.5,-0.5\n";
  EXPECT_EQ(run(base + "--baseline file:" + (root() / "b.csv").string() + " --out " + out("attr_file").string()).code, 0);
  const Json m = carprobe::io::load_json(out("attr_blur") / "manifest.json");
  EXPECT_EQ(m["config"]["baseline"], "blur:1");
}

TEST_F(Cli, TcavAndTuneWriteReports) {
  const auto t = run("tcav " + data_flags(cls_dir()) + " --net " + (cls_dir() / "net.json").string() + " --truth " +
                     (cls_dir() / "ground_truth.csv").string() + " --out " + out("tcav").string());
  ASSERT_EQ(t.code, 0) << t.err;
  const auto lines = slurp(out("tcav") / "tcav_scores.jsonl");
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 3 * 4);
  EXPECT_TRUE(fs::exists(out("tcav") / "tcav_eval.json"));

  const auto u = run("tune " + data_flags(xor_dir()) + " --kernels rbf linear --c-values 1 --out " + out("tune").string());
  ASSERT_EQ(u.code, 0) << u.err;
  const Json j = carprobe::io::load_json(out("tune") / "tune_diagonal.json");
  EXPECT_EQ(j["concept"], "diagonal");
  EXPECT_NE(u.out.find("best diagonal: kernel gaussian_rbf"), std::string::npos) << u.out;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("fit --bogus").code, 2);
  EXPECT_EQ(run("fit " + data_flags(xor_dir())).code, 2);  // --out required
  EXPECT_EQ(run("tcar --latents x --car y --out " + out("usage").string()).code, 2);
}

}  // namespace
