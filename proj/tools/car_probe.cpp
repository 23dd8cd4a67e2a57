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

// car_probe: command-line workflows over the carprobe library.
//
// Every command writes its reports and a manifest.json under --out. Exit codes:
// 0 success, 2 usage or input error, 3 solver non-convergence, 4 incompatible
// artifacts (dimension or format version mismatch).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "carprobe/attribution.hpp"
#include "carprobe/core.hpp"
#include "carprobe/density.hpp"
#include "carprobe/error.hpp"
#include "carprobe/io.hpp"
#include "carprobe/kernels.hpp"
#include "carprobe/linear_probe.hpp"
#include "carprobe/net.hpp"
#include "carprobe/scores.hpp"
#include "carprobe/svc.hpp"
#include "carprobe/synth.hpp"

namespace {

using namespace carprobe;
using io::Json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kManifestName = "manifest.json";
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIncompatible = 4;

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw Error(ErrorKind::kInvalidArgument, what + ": '" + text + "' is not a number");
  }
  return v;
}

std::string digest_hex(std::string_view bytes) {
  return fingerprint_hex(fnv1a64(std::span(reinterpret_cast<const unsigned char*>(bytes.data()),
                                           bytes.size())));
}

// Concept names become file name components.
std::string file_stem(std::string_view name) {
  std::string out(name);
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return out;
}

struct SeedOption {
  std::uint64_t value = 0;
  CLI::Option* flag = nullptr;

  void add(CLI::App* cmd) {
    flag = cmd->add_option("--seed", value, "Seed for all randomness (default: $CAR_PROBE_SEED or 0)");
  }
  Json resolve() {
    std::string source = "flag";
    if (flag->count() == 0) {
      source = "default";
      value = 0;
      if (const char* env = std::getenv("CAR_PROBE_SEED"); env != nullptr && *env != '\0') {
        const std::string text(env);
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
          throw Error(ErrorKind::kInvalidArgument, "CAR_PROBE_SEED='" + text + "' is not an unsigned integer");
        }
        source = "env";
      }
    }
    return Json{{"value", value}, {"source", source}};
  }
};

// Collects inputs, outputs and configuration for manifest.json.
class Run {
 public:
  Run(std::string command, fs::path out)
      : command_(std::move(command)), out_(std::move(out)), start_(std::chrono::steady_clock::now()),
        started_at_(std::time(nullptr)) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot create '" + out_.string() + "': " + ec.message());
  }

  Json& config() { return config_; }
  Json& seeds() { return seeds_; }

  void input(const std::string& role, const fs::path& path) {
    inputs_[role] = {{"path", path.string()}, {"fnv1a64", digest_hex(io::read_file(path))}};
  }
  void latents_input(const fs::path& path) {
    input("latents", path);
    if (fs::exists(io::truth_path_for(path))) input("latents_truth", io::truth_path_for(path));
  }

  void write(const std::string& name, const std::string& content) {
    io::write_file(out_ / name, content);
    outputs_[name] = digest_hex(content);
  }
  /// JSON artifacts carry a pointer back to the manifest.
  void write_json(const std::string& name, Json doc) {
    doc["manifest"] = kManifestName;
    write(name, io::dump_json(doc));
  }
  /// CSV reports get a "# manifest:" comment after the format line.
  void write_csv(const std::string& name, const std::string& csv) {
    const auto eol = csv.find('\n') + 1;
    write(name, csv.substr(0, eol) + "# manifest: " + kManifestName + "\n" + csv.substr(eol));
  }
  void write_jsonl(const std::string& name, const std::vector<Json>& records) {
    std::string text;
    for (auto r : records) {
      r["manifest"] = kManifestName;
      text += r.dump() + "\n";
    }
    write(name, text);
  }

  void finish() const {
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_at_));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json m = {{"format", "run_manifest"},
              {"version", io::kFormatVersion},
              {"command", command_},
              {"tool_version", kToolVersion},
              {"config", config_},
              {"seeds", seeds_},
              {"inputs", inputs_},
              {"outputs", outputs_},
              {"timing", {{"started_at", stamp}, {"wall_seconds", wall}}}};
    io::save_json(out_ / kManifestName, m);
  }

 private:
  std::string command_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  std::time_t started_at_;
  Json config_ = Json::object();
  Json seeds_ = Json::object();
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
};

struct DataOptions {
  std::string latents;
  std::string concepts;
  std::vector<std::string> names;

  void add(CLI::App* cmd, bool need_concepts = true) {
    cmd->add_option("--latents", latents, "Latents CSV (id,label?,h0..)")->required();
    if (need_concepts) {
      cmd->add_option("--concepts", concepts, "Concept sets JSON")->required();
      cmd->add_option("--concept", names, "Concept to process (repeatable; default: all)");
    }
  }
};

struct LoadedData {
  LatentDataset dataset;
  std::map<std::string, ConceptSets> sets;  // only the selected concepts
};

LoadedData load_data(const DataOptions& opt, Run& run) {
  run.latents_input(opt.latents);
  LatentDataset ds = io::load_latents(opt.latents);
  run.input("concepts", opt.concepts);
  auto all = io::bind_concepts(io::load_concepts(opt.concepts), ds);
  std::map<std::string, ConceptSets> chosen;
  if (opt.names.empty()) {
    chosen = std::move(all);
  } else {
    for (const auto& name : opt.names) {
      const auto it = all.find(name);
      if (it == all.end()) {
        throw Error(ErrorKind::kUnknownConcept, "concept '" + name + "' is not in " + opt.concepts);
      }
      chosen.insert(*it);
    }
  }
  return {std::move(ds), std::move(chosen)};
}

struct KernelOptions {
  std::string kind = "rbf";
  std::string gamma = "scale";
  bool allow_tune = false;

  void add(CLI::App* cmd, bool tune = false) {
    allow_tune = tune;
    cmd->add_option("--kernel", kind, "rbf | linear")->check(CLI::IsMember({"rbf", "linear"}));
    cmd->add_option("--gamma", gamma,
                    allow_tune ? "scale | tune | numeric RBF gamma" : "scale | numeric RBF gamma");
  }

  /// "scale" resolves to 1 / (d * variance of all latent entries).
  KernelSpec resolve(const LatentDataset& ds, Json& config) const {
    if (kind == "linear") {
      config["kernel"] = {{"kind", "linear"}};
      return KernelSpec::linear();
    }
    double g = 0.0;
    if (gamma == "scale") g = default_gamma(ds.reps());
    else if (gamma == "tune" && allow_tune) g = default_gamma(ds.reps());  // grid centre; tuned per concept
    else g = parse_double(gamma, "--gamma");
    config["kernel"] = {{"kind", "rbf"}, {"gamma_requested", gamma}, {"gamma", g}};
    return KernelSpec::rbf(g);
  }
};

// ---------------------------------------------------------------------------

struct FitArgs {
  DataOptions data;
  KernelOptions kernel;
  SeedOption seed;
  double c_penalty = 1.0;
  double kkt_tol = 1e-3;
  std::size_t max_passes = 200;
  std::size_t holdout = 0;
  std::string out;
};

int run_fit(FitArgs& a) {
  Run run("fit", a.out);
  run.seeds()["seed"] = a.seed.resolve();
  auto data = load_data(a.data, run);
  const KernelSpec kernel = a.kernel.resolve(data.dataset, run.config());
  TrainConfig cfg{a.c_penalty, a.kkt_tol, a.max_passes, a.seed.value};
  cfg.validate();
  run.config()["c_penalty"] = cfg.c_penalty;
  run.config()["kkt_tolerance"] = cfg.kkt_tolerance;
  run.config()["max_passes"] = cfg.max_passes;
  run.config()["holdout_per_side"] = a.holdout;

  bool all_converged = true;
  Json summary = {{"format", "fit_report"}, {"version", io::kFormatVersion}, {"concepts", Json::object()}};
  for (const auto& [name, sets] : data.sets) {
    ConceptSets train = sets;
    std::optional<ConceptSets> hold;
    if (a.holdout > 0) {
      auto split = holdout_split(sets, a.holdout, a.seed.value);
      train = std::move(split.first);
      hold = std::move(split.second);
    }
    const CarClassifier clf = fit_car(train, data.dataset, kernel, cfg);
    run.write_json("car_" + file_stem(name) + ".json", io::to_json(clf));
    Json entry = {{"converged", clf.converged},
                  {"iterations", clf.iterations},
                  {"kkt_violation", clf.kkt_violation},
                  {"support_vectors", clf.support_reps.rows()},
                  {"train_per_side", train.per_side()}};
    if (hold) {
      const Accuracy acc = car_accuracy(clf, data.dataset, *hold);
      entry["holdout_accuracy"] = acc.value();
      entry["holdout_correct"] = acc.correct;
      entry["holdout_total"] = acc.total;
      std::printf("holdout accuracy %s: %s (%zu/%zu)\n", name.c_str(),
                  io::format_double(acc.value()).c_str(), acc.correct, acc.total);
    }
    if (!clf.converged) {
      all_converged = false;
      std::fprintf(stderr, "warning: solver did not converge for concept '%s' (kkt violation %g)\n",
                   name.c_str(), clf.kkt_violation);
    }
    summary["concepts"][name] = entry;
  }
  run.write_json("fit_report.json", summary);
  run.finish();
  return all_converged ? 0 : kExitNonConvergence;
}

// ---------------------------------------------------------------------------

struct TcarArgs {
  DataOptions data;
  std::vector<std::string> models;
  bool by_class = false;
  bool pair = false;
  std::string truth;
  std::string out;
};

int run_tcar(TcarArgs& a) {
  if (!a.by_class && !a.pair) throw Error(ErrorKind::kInvalidArgument, "tcar needs --by-class and/or --pair");
  if (!a.truth.empty() && !a.by_class) throw Error(ErrorKind::kInvalidArgument, "--truth requires --by-class");
  Run run("tcar", a.out);
  run.latents_input(a.data.latents);
  const LatentDataset ds = io::load_latents(a.data.latents);

  std::map<std::string, CarClassifier> models;
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    run.input("car_" + std::to_string(i), a.models[i]);
    CarClassifier clf = io::car_from_json(io::load_json(a.models[i]));
    require_same_dim(static_cast<long>(ds.dim()), static_cast<long>(clf.dim()),
                     "classifier " + a.models[i] + " vs latents");
    const std::string name = clf.concept_name;
    if (!models.emplace(name, std::move(clf)).second) {
      throw Error(ErrorKind::kDuplicateId, "two classifiers for concept '" + name + "'");
    }
  }
  run.config()["by_class"] = a.by_class;
  run.config()["pair"] = a.pair;

  std::vector<ScoreReport> reports;
  if (a.by_class) {
    const int n_classes = ds.num_classes();
    for (const auto& [name, clf] : models) {
      for (int k = 0; k < n_classes; ++k) {
        if (!ds.class_indices(k).empty()) reports.push_back(tcar_class_concept(clf, ds, k));
      }
    }
  }
  if (a.pair) {
    for (auto i = models.begin(); i != models.end(); ++i) {
      for (auto j = std::next(i); j != models.end(); ++j) {
        reports.push_back(tcar_concept_concept(i->second, j->second, ds));
      }
    }
  }
  std::vector<Json> records;
  for (const auto& r : reports) records.push_back(io::to_json(r));
  run.write_jsonl("tcar_scores.jsonl", records);
  run.write_csv("tcar_scores.csv", io::scores_to_csv(reports));

  if (!a.truth.empty()) {
    run.input("truth", a.truth);
    const auto rows = io::parse_ground_truth_csv(io::read_file(a.truth));
    std::map<std::pair<int, std::string>, double> expected;
    for (const auto& row : rows) expected[{row.class_index, row.concept_name}] = row.proportion;
    std::vector<double> got;
    std::vector<double> want;
    for (const auto& r : reports) {
      if (r.kind != ScoreKind::kTcarClass) continue;
      const auto it = expected.find({*r.class_index, r.concepts.front()});
      if (it == expected.end()) continue;
      got.push_back(r.value);
      want.push_back(it->second);
    }
    const double r = pearson_r(got, want);
    Json eval = {{"format", "score_eval"},
                 {"version", io::kFormatVersion},
                 {"score", "tcar_class"},
                 {"pairs", got.size()},
                 {"pearson_r", r}};
    run.write_json("tcar_eval.json", eval);
    std::printf("r(TCAR, TrueProp) = %s over %zu pairs\n", io::format_double(r).c_str(), got.size());
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct TcavArgs {
  DataOptions data;
  SeedOption seed;
  std::string net;
  std::vector<int> classes;
  std::string space = "latent";
  CavConfig cav;
  std::string truth;
  std::string out;
};

int run_tcav(TcavArgs& a) {
  Run run("tcav", a.out);
  run.seeds()["seed"] = a.seed.resolve();
  auto data = load_data(a.data, run);
  run.input("net", a.net);
  const FeedforwardNet net = io::net_from_json(io::load_json(a.net));
  const RowSpace space = a.space == "input" ? RowSpace::kInput : RowSpace::kLatent;
  require_same_dim(static_cast<long>(space == RowSpace::kInput ? net.input_dim() : net.latent_dim()),
                   static_cast<long>(data.dataset.dim()), "net (" + a.space + " space) vs latents");
  std::vector<int> classes = a.classes;
  if (classes.empty()) {
    for (int k = 0; k < static_cast<int>(net.output_dim()); ++k) classes.push_back(k);
  }
  std::sort(classes.begin(), classes.end());
  a.cav.seed = a.seed.value;
  run.config()["space"] = a.space;
  run.config()["classes"] = classes;
  run.config()["learning_rate"] = a.cav.learning_rate;
  run.config()["epochs"] = a.cav.epochs;
  run.config()["tolerance"] = a.cav.tolerance;

  // tcav_score reads class membership from the dataset labels; the net defines
  // which rows the sensitivity is measured on.
  std::vector<ScoreReport> reports;
  for (const auto& [name, sets] : data.sets) {
    CavClassifier cav;
    if (space == RowSpace::kLatent) {
      cav = fit_cav(sets, data.dataset, a.cav);
    } else {
      // Fit in latent space: map rows through g first.
      Matrix h(static_cast<Eigen::Index>(data.dataset.size()), static_cast<Eigen::Index>(net.latent_dim()));
      for (Index i = 0; i < data.dataset.size(); ++i) {
        h.row(static_cast<Eigen::Index>(i)) = net.features(data.dataset.row(i)).transpose();
      }
      cav = fit_cav(sets, LatentDataset(data.dataset.ids(), std::move(h)), a.cav);
    }
    run.write_json("cav_" + file_stem(name) + ".json", io::to_json(cav));
    for (int k : classes) reports.push_back(tcav_score(cav, net, data.dataset, k, space));
  }
  std::vector<Json> records;
  for (const auto& r : reports) records.push_back(io::to_json(r));
  run.write_jsonl("tcav_scores.jsonl", records);
  run.write_csv("tcav_scores.csv", io::scores_to_csv(reports));

  if (!a.truth.empty()) {
    run.input("truth", a.truth);
    std::map<std::pair<int, std::string>, double> expected;
    for (const auto& row : io::parse_ground_truth_csv(io::read_file(a.truth))) {
      expected[{row.class_index, row.concept_name}] = row.proportion;
    }
    std::vector<double> got;
    std::vector<double> want;
    for (const auto& r : reports) {
      const auto it = expected.find({*r.class_index, r.concepts.front()});
      if (it == expected.end()) continue;
      got.push_back(r.value);
      want.push_back(it->second);
    }
    const double r = pearson_r(got, want);
    run.write_json("tcav_eval.json", {{"format", "score_eval"},
                                      {"version", io::kFormatVersion},
                                      {"score", "tcav"},
                                      {"pairs", got.size()},
                                      {"pearson_r", r}});
    std::printf("r(TCAV, TrueProp) = %s over %zu pairs\n", io::format_double(r).c_str(), got.size());
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct AttributeArgs {
  DataOptions data;
  KernelOptions kernel;
  std::string net;
  std::string inputs;
  std::vector<std::string> ids;
  std::string baseline = "zeros";
  std::string grid;
  std::size_t steps = 50;
  unsigned threads = 1;
  std::string out;
};

std::optional<GridShape> parse_grid(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto x = text.find('x');
  if (x == std::string::npos) throw Error(ErrorKind::kInvalidArgument, "--grid expects ROWSxCOLS, got '" + text + "'");
  GridShape g;
  const auto rows = text.substr(0, x);
  const auto cols = text.substr(x + 1);
  const auto r1 = std::from_chars(rows.data(), rows.data() + rows.size(), g.rows);
  const auto r2 = std::from_chars(cols.data(), cols.data() + cols.size(), g.cols);
  if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != rows.data() + rows.size() ||
      r2.ptr != cols.data() + cols.size() || g.rows == 0 || g.cols == 0) {
    throw Error(ErrorKind::kInvalidArgument, "--grid expects ROWSxCOLS, got '" + text + "'");
  }
  return g;
}

Baseline parse_baseline(const std::string& text, const Matrix& inputs, const std::optional<GridShape>& grid,
                        Run& run) {
  if (text == "zeros") return Baseline::zeros();
  if (text == "mean") return Baseline::mean_of(inputs);
  if (text.starts_with("blur:")) return Baseline::blur(parse_double(text.substr(5), "--baseline blur sigma"), grid);
  if (text.starts_with("file:")) {
    const fs::path path = text.substr(5);
    run.input("baseline", path);
    const LatentDataset b = io::parse_latents_csv(io::read_file(path));
    if (b.size() != 1) throw Error(ErrorKind::kSchemaError, "baseline file must hold exactly one row");
    return Baseline::explicit_vector(b.row(0));
  }
  throw Error(ErrorKind::kInvalidArgument,
              "--baseline must be zeros, mean, blur:<sigma> or file:<path>, got '" + text + "'");
}

int run_attribute(AttributeArgs& a) {
  Run run("attribute", a.out);
  auto data = load_data(a.data, run);
  run.input("net", a.net);
  const FeedforwardNet net = io::net_from_json(io::load_json(a.net));
  require_same_dim(static_cast<long>(net.latent_dim()), static_cast<long>(data.dataset.dim()),
                   "net latent layer vs latents");
  const fs::path inputs_path = a.inputs.empty() ? fs::path(a.data.latents) : fs::path(a.inputs);
  if (!a.inputs.empty()) run.input("inputs", inputs_path);
  const LatentDataset inputs = io::parse_latents_csv(io::read_file(inputs_path));
  require_same_dim(static_cast<long>(net.input_dim()), static_cast<long>(inputs.dim()), "net input vs inputs");

  const KernelSpec base_kernel = a.kernel.resolve(data.dataset, run.config());
  const auto grid = parse_grid(a.grid);
  AttributionConfig cfg;
  cfg.steps = a.steps;
  cfg.baseline = parse_baseline(a.baseline, inputs.reps(), grid, run);
  run.config()["steps"] = cfg.steps;
  run.config()["baseline"] = cfg.baseline.label();
  if (grid) run.config()["grid"] = {grid->rows, grid->cols};

  std::vector<Index> rows;
  if (a.ids.empty()) {
    for (Index i = 0; i < inputs.size(); ++i) rows.push_back(i);
  } else {
    for (const auto& id : a.ids) {
      const auto idx = inputs.index_of(id);
      if (!idx) throw Error(ErrorKind::kUnknownId, "input id '" + id + "' not found");
      rows.push_back(*idx);
    }
  }
  std::sort(rows.begin(), rows.end(), [&](Index x, Index y) { return inputs.ids()[x] < inputs.ids()[y]; });
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  std::vector<io::AttributionRecord> records;
  Json tuned = Json::object();
  for (const auto& [name, sets] : data.sets) {
    ConceptDensity density = ConceptDensity::from_sets(sets, data.dataset, base_kernel);
    if (a.kernel.gamma == "tune" && base_kernel.kind == KernelKind::kGaussianRbf) {
      const auto t = tune_density_gamma(density, log_gamma_grid(base_kernel.gamma));
      density = density.with_kernel(KernelSpec::rbf(t.gamma));
      tuned[name] = {{"gamma", t.gamma}, {"training_accuracy", t.training_accuracy}};
    }
    run.write_json("density_" + file_stem(name) + ".json", io::to_json(density));

    std::vector<AttributionResult> results(rows.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(a.threads, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < rows.size(); i += threads) {
            results[i] = car_feature_importance(density, net, inputs.row(rows[i]), cfg);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      io::AttributionRecord rec;
      rec.example_id = inputs.ids()[rows[i]];
      rec.concept_name = name;
      rec.gamma = density.kernel().gamma;
      rec.baseline_kind = cfg.baseline.label();
      rec.result = std::move(results[i]);
      rec.result.scores = rec.result.scores.array() + 0.0;  // no negative zeros in reports
      records.push_back(std::move(rec));
    }
  }
  if (!tuned.empty()) run.config()["tuned_gamma"] = tuned;
  std::stable_sort(records.begin(), records.end(), [](const auto& x, const auto& y) {
    return std::tie(x.example_id, x.concept_name) < std::tie(y.example_id, y.concept_name);
  });

  double worst = 0.0;
  for (const auto& r : records) {
    const auto check = completeness_check(r.result, 1e-3);
    worst = std::max(worst, check.gap / std::max(std::abs(r.result.target_value - r.result.baseline_value),
                                                 kCompletenessFloor));
  }
  std::vector<Json> lines;
  for (const auto& r : records) lines.push_back(io::to_json(r));
  run.write_jsonl("attributions.jsonl", lines);
  run.write_csv("attributions.csv", io::attributions_to_csv(records));
  std::printf("attributed %zu rows x %zu concepts; worst relative completeness gap %s\n", rows.size(),
              data.sets.size(), io::format_double(worst).c_str());
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct PermArgs {
  DataOptions data;
  KernelOptions kernel;
  SeedOption seed;
  double c_penalty = 1.0;
  std::size_t holdout = 0;
  std::size_t n_perm = 100;
  unsigned threads = 1;
  std::string out;
};

int run_perm(PermArgs& a) {
  Run run("perm-test", a.out);
  run.seeds()["seed"] = a.seed.resolve();
  auto data = load_data(a.data, run);
  const KernelSpec kernel = a.kernel.resolve(data.dataset, run.config());
  TrainConfig cfg;
  cfg.c_penalty = a.c_penalty;
  cfg.seed = a.seed.value;
  run.config()["c_penalty"] = cfg.c_penalty;
  run.config()["holdout_per_side"] = a.holdout;
  run.config()["n_perm"] = a.n_perm;
  if (a.holdout == 0) throw Error(ErrorKind::kInvalidArgument, "perm-test needs --holdout >= 1");
  for (const auto& [name, sets] : data.sets) {
    const auto [train, hold] = holdout_split(sets, a.holdout, a.seed.value);
    const auto res = permutation_test(train, data.dataset, kernel, cfg, hold, a.n_perm, a.seed.value, a.threads);
    run.write_json("perm_" + file_stem(name) + ".json", io::to_json(res, name));
    std::printf("p-value %s: %s (observed accuracy %s, %zu permutations)\n", name.c_str(),
                io::format_double(res.p_value).c_str(), io::format_double(res.observed_accuracy).c_str(),
                res.permuted_accuracies.size());
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct TuneArgs {
  DataOptions data;
  SeedOption seed;
  std::vector<std::string> kernels{"rbf", "linear"};
  std::vector<double> gammas;
  std::vector<double> c_values{0.1, 1.0, 10.0};
  double val_fraction = 0.3;
  std::string out;
};

int run_tune(TuneArgs& a) {
  Run run("tune", a.out);
  run.seeds()["seed"] = a.seed.resolve();
  auto data = load_data(a.data, run);
  std::vector<double> gammas = a.gammas;
  if (gammas.empty()) gammas = log_gamma_grid(default_gamma(data.dataset.reps()));
  std::vector<TuneCandidate> candidates;
  for (const auto& kind : a.kernels) {
    for (double c : a.c_values) {
      if (kind == "linear") {
        candidates.push_back({KernelSpec::linear(), c});
      } else {
        for (double g : gammas) candidates.push_back({KernelSpec::rbf(g), c});
      }
    }
  }
  run.config()["kernels"] = a.kernels;
  run.config()["gammas"] = gammas;
  run.config()["c_values"] = a.c_values;
  run.config()["val_fraction"] = a.val_fraction;
  for (const auto& [name, sets] : data.sets) {
    const auto res = tune_kernel(sets, data.dataset, candidates, a.val_fraction, a.seed.value);
    Json doc = io::to_json(res, candidates);
    doc["concept"] = name;
    run.write_json("tune_" + file_stem(name) + ".json", doc);
    std::printf("best %s: kernel %s gamma %s C %s (validation accuracy %s)\n", name.c_str(),
                std::string(to_string(res.kernel.kind)).c_str(), io::format_double(res.kernel.gamma).c_str(),
                io::format_double(res.c_penalty).c_str(), io::format_double(res.validation_accuracy).c_str());
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SeedOption seed;
  std::string kind = "xor";
  std::string labels = "half";
  double scale = 1.0;
  double std = 0.3;
  std::size_t n_per_cluster = 50;
  int classes = 6;
  int concepts = 4;
  std::size_t clusters_per_class = 5;
  double class_sep = 3.0;
  double concept_sep = 1.0;
  std::string out;
};

int run_synth(SynthArgs& a) {
  Run run("synth", a.out);
  run.seeds()["seed"] = a.seed.resolve();
  SyntheticSpec spec;
  if (a.kind == "xor") {
    spec = xor_spec(a.scale, a.std, a.n_per_cluster, a.seed.value);
    // Quadrant labels give each cluster its own class, so the diagonal
    // concept's class proportions vary (1, 0, 0, 1).
    if (a.labels == "quadrant") {
      for (std::size_t i = 0; i < spec.clusters.size(); ++i) spec.clusters[i].label = static_cast<int>(i);
    }
    run.config() = {{"kind", "xor"}, {"labels", a.labels}, {"scale", a.scale}};
  } else {
    spec = class_concept_spec(a.classes, a.concepts, a.clusters_per_class, a.class_sep, a.concept_sep, a.std,
                              a.n_per_cluster, a.seed.value);
    run.config() = {{"kind", "classes"},           {"classes", a.classes},
                    {"concepts", a.concepts},      {"clusters_per_class", a.clusters_per_class},
                    {"class_sep", a.class_sep},    {"concept_sep", a.concept_sep}};
  }
  run.config()["cluster_std"] = a.std;
  run.config()["n_per_cluster"] = a.n_per_cluster;

  const SyntheticData data = make_synthetic(spec);
  run.write("latents.csv", io::latents_to_csv(data.dataset));
  run.write("latents.truth.json", io::dump_json(io::concept_truth_to_json(data.dataset)));
  run.write_json("concepts.json", io::concepts_to_json(data.concept_sets, data.dataset));
  run.write_csv("ground_truth.csv", io::ground_truth_to_csv(data.ground_truth));
  const auto centers = class_centers(spec);
  if (centers.size() >= 2) run.write_json("net.json", io::to_json(nearest_centroid_net(centers)));
  std::printf("wrote %zu examples of dimension %zu with %zu concepts\n", data.dataset.size(),
              data.dataset.dim(), data.concept_sets.size());
  run.finish();
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kVersionMismatch:
      return kExitIncompatible;
    default:
      return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept activation region probes over latent representations"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", kToolVersion);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for per-example work")->check(CLI::Range(1u, 256u));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit kernel concept classifiers (one per concept)");
  fit.data.add(fit_cmd);
  fit.kernel.add(fit_cmd);
  fit.seed.add(fit_cmd);
  fit_cmd->add_option("--c-penalty", fit.c_penalty, "Soft-margin penalty C");
  fit_cmd->add_option("--kkt-tol", fit.kkt_tol, "SMO stopping tolerance");
  fit_cmd->add_option("--max-passes", fit.max_passes, "SMO iteration cap, in multiples of n");
  fit_cmd->add_option("--holdout", fit.holdout, "Hold out this many examples per side and report accuracy");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  TcarArgs tcar;
  auto* tcar_cmd = app.add_subcommand("tcar", "TCAR scores from fitted classifiers");
  tcar.data.add(tcar_cmd, false);
  tcar_cmd->add_option("--car", tcar.models, "Classifier JSON from fit (repeatable)")->required();
  tcar_cmd->add_flag("--by-class", tcar.by_class, "Class-concept scores for every class");
  tcar_cmd->add_flag("--pair", tcar.pair, "Concept-concept scores for every pair");
  tcar_cmd->add_option("--truth", tcar.truth, "Ground-truth proportions CSV; reports r(TCAR, truth)");
  tcar_cmd->add_option("--out", tcar.out, "Output directory")->required();

  TcavArgs tcav;
  auto* tcav_cmd = app.add_subcommand("tcav", "TCAV scores from linear concept probes");
  tcav.data.add(tcav_cmd);
  tcav.seed.add(tcav_cmd);
  tcav_cmd->add_option("--net", tcav.net, "Network JSON")->required();
  tcav_cmd->add_option("--class", tcav.classes, "Class index (repeatable; default: all)");
  tcav_cmd->add_option("--space", tcav.space, "Rows are net inputs or latents")
      ->check(CLI::IsMember({"latent", "input"}));
  tcav_cmd->add_option("--learning-rate", tcav.cav.learning_rate, "Probe learning rate");
  tcav_cmd->add_option("--epochs", tcav.cav.epochs, "Probe epochs");
  tcav_cmd->add_option("--tolerance", tcav.cav.tolerance, "Probe early-stop tolerance");
  tcav_cmd->add_option("--truth", tcav.truth, "Ground-truth proportions CSV; reports r(TCAV, truth)");
  tcav_cmd->add_option("--out", tcav.out, "Output directory")->required();

  AttributeArgs attr;
  auto* attr_cmd = app.add_subcommand("attribute", "Concept feature importance via integrated gradients");
  attr.data.add(attr_cmd);
  attr.kernel.add(attr_cmd, true);
  attr_cmd->add_option("--net", attr.net, "Network JSON")->required();
  attr_cmd->add_option("--inputs", attr.inputs, "Inputs CSV in latents format (default: --latents)");
  attr_cmd->add_option("--id", attr.ids, "Input id to attribute (repeatable; default: all)");
  attr_cmd->add_option("--baseline", attr.baseline, "zeros | mean | blur:<sigma> | file:<csv>");
  attr_cmd->add_option("--grid", attr.grid, "Input grid shape ROWSxCOLS (blur baseline)");
  attr_cmd->add_option("--steps", attr.steps, "Trapezoid intervals along the path");
  attr_cmd->add_option("--out", attr.out, "Output directory")->required();

  PermArgs perm;
  auto* perm_cmd = app.add_subcommand("perm-test", "Permutation test of classifier holdout accuracy");
  perm.data.add(perm_cmd);
  perm.kernel.add(perm_cmd);
  perm.seed.add(perm_cmd);
  perm_cmd->add_option("--c-penalty", perm.c_penalty, "Soft-margin penalty C");
  perm_cmd->add_option("--holdout", perm.holdout, "Held-out examples per side")->required();
  perm_cmd->add_option("--n-perm", perm.n_perm, "Number of label permutations");
  perm_cmd->add_option("--out", perm.out, "Output directory")->required();

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search over kernel, gamma and C");
  tune.data.add(tune_cmd);
  tune.seed.add(tune_cmd);
  tune_cmd->add_option("--kernels", tune.kernels, "Kernel kinds to try")
      ->check(CLI::IsMember({"rbf", "linear"}));
  tune_cmd->add_option("--gammas", tune.gammas, "RBF gammas (default: log grid around scale)");
  tune_cmd->add_option("--c-values", tune.c_values, "Penalties C to try");
  tune_cmd->add_option("--val-fraction", tune.val_fraction, "Validation fraction per side");
  tune_cmd->add_option("--out", tune.out, "Output directory")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic latent dataset with concept truth");
  synth.seed.add(synth_cmd);
  synth_cmd->add_option("--kind", synth.kind, "xor | classes")->check(CLI::IsMember({"xor", "classes"}));
  synth_cmd->add_option("--labels", synth.labels, "xor class labels: half | quadrant")
      ->check(CLI::IsMember({"half", "quadrant"}));
  synth_cmd->add_option("--scale", synth.scale, "xor cluster offset");
  synth_cmd->add_option("--std", synth.std, "Cluster standard deviation");
  synth_cmd->add_option("--n-per-cluster", synth.n_per_cluster, "Examples per cluster");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes (classes kind)");
  synth_cmd->add_option("--concepts", synth.concepts, "Number of concepts (classes kind)");
  synth_cmd->add_option("--clusters-per-class", synth.clusters_per_class, "Clusters per class (classes kind)");
  synth_cmd->add_option("--class-sep", synth.class_sep, "Class centre offset (classes kind)");
  synth_cmd->add_option("--concept-sep", synth.concept_sep, "Concept centre offset (classes kind)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }
  attr.threads = threads;
  perm.threads = threads;

  try {
    if (fit_cmd->parsed()) return run_fit(fit);
    if (tcar_cmd->parsed()) return run_tcar(tcar);
    if (tcav_cmd->parsed()) return run_tcav(tcav);
    if (attr_cmd->parsed()) return run_attribute(attr);
    if (perm_cmd->parsed()) return run_perm(perm);
    if (tune_cmd->parsed()) return run_tune(tune);
    if (synth_cmd->parsed()) return run_synth(synth);
  } catch (const Error& e) {
    std::fprintf(stderr, "car_probe: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "car_probe: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
