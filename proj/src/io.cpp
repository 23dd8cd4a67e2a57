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

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "carprobe/error.hpp"

namespace carprobe::io {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

Json parse_json(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchemaError, std::string(origin) + ": malformed JSON: " + e.what());
  }
}

Json load_json(const fs::path& path) { return parse_json(read_file(path), path.string()); }

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

void save_json(const fs::path& path, const Json& doc) { write_file(path, dump_json(doc)); }

void check_header(const Json& doc, std::string_view format) {
  if (!doc.is_object() || !doc.contains("format") || !doc.contains("version")) {
    throw Error(ErrorKind::kSchemaError,
                "document lacks a {\"format\", \"version\"} header (expected " + std::string(format) + ")");
  }
  if (!doc["format"].is_string() || doc["format"].get<std::string>() != format) {
    throw Error(ErrorKind::kSchemaError, "expected format '" + std::string(format) + "', found " +
                                             doc["format"].dump());
  }
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kFormatVersion) {
    throw Error(ErrorKind::kVersionMismatch, "format '" + std::string(format) + "' version " +
                                                 doc["version"].dump() + " is not supported (expected " +
                                                 std::to_string(kFormatVersion) + ")");
  }
}

namespace {

Json header(std::string_view format) {
  Json j = Json::object();
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

// Field access that turns nlohmann type errors into schema errors.
template <typename T>
T field(const Json& j, std::string_view key) {
  const std::string k(key);
  if (!j.is_object() || !j.contains(k)) throw Error(ErrorKind::kSchemaError, "missing field '" + k + "'");
  try {
    return j.at(k).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchemaError, "field '" + k + "': " + e.what());
  }
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

Vector vector_from(const Json& j, std::string_view what) {
  if (!j.is_array()) throw Error(ErrorKind::kSchemaError, std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::kSchemaError, std::string(what) + " holds a non-number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from(const Json& j, std::size_t cols, std::string_view what) {
  if (!j.is_array()) throw Error(ErrorKind::kSchemaError, std::string(what) + " must be an array");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from(j[i], what);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw Error(ErrorKind::kRaggedRows, std::string(what) + " row " + std::to_string(i) +
                                              " has " + std::to_string(row.size()) + " entries, expected " +
                                              std::to_string(cols));
    }
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

std::size_t row_width(const Json& j) {
  return j.is_array() && !j.empty() && j[0].is_array() ? j[0].size() : 0;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

struct CsvLine {
  std::size_t number = 0;  // 1-based
  std::string_view text;
};

// Splits into non-empty lines and checks the "# format: <name> <version>" line.
std::vector<CsvLine> csv_body(std::string_view text, std::string_view format) {
  std::vector<CsvLine> lines;
  std::size_t number = 0;
  bool saw_header = false;
  for (auto raw : split(text, '\n')) {
    ++number;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kTag = "# format:";
      if (!saw_header && line.starts_with(kTag)) {
        std::istringstream in{std::string(line.substr(kTag.size()))};
        std::string name;
        int version = -1;
        in >> name >> version;
        if (name != format) {
          throw Error(ErrorKind::kSchemaError,
                      "expected CSV format '" + std::string(format) + "', found '" + name + "'");
        }
        if (version != kFormatVersion) {
          throw Error(ErrorKind::kVersionMismatch, "CSV format '" + name + "' version " +
                                                       std::to_string(version) + " is not supported (expected " +
                                                       std::to_string(kFormatVersion) + ")");
        }
        saw_header = true;
      }
      continue;
    }
    if (!saw_header) {
      throw Error(ErrorKind::kSchemaError,
                  "missing '# format: " + std::string(format) + " 1' line before the data");
    }
    lines.push_back({number, line});
  }
  if (!saw_header) {
    throw Error(ErrorKind::kSchemaError, "missing '# format: " + std::string(format) + " 1' line");
  }
  return lines;
}

double parse_number(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || cell.empty()) {
    throw Error(ErrorKind::kParseError, "line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ": '" + std::string(cell) +
                                            "' is not a number");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kNonFiniteValue, "line " + std::to_string(line) + ", column " +
                                                std::to_string(column) + ": non-finite value '" +
                                                std::string(cell) + "'");
  }
  return value;
}

int parse_int(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  int value = 0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || cell.empty()) {
    throw Error(ErrorKind::kParseError, "line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ": '" + std::string(cell) +
                                            "' is not an integer");
  }
  return value;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// Latents

LatentDataset parse_latents_csv(std::string_view text, const LatentDataset::ConceptTruth& truth) {
  const auto lines = csv_body(text, "latents");
  if (lines.empty()) throw Error(ErrorKind::kSchemaError, "latents CSV has no header row");

  const auto head = split(lines.front().text, ',');
  if (head.empty() || trim(head[0]) != "id") {
    throw Error(ErrorKind::kSchemaError, "latents header must start with 'id'");
  }
  const bool has_label = head.size() > 1 && trim(head[1]) == "label";
  const std::size_t first_dim = has_label ? 2 : 1;
  const std::size_t dim = head.size() - first_dim;
  if (dim < 1) throw Error(ErrorKind::kSchemaError, "latents header declares no h columns");
  for (std::size_t d = 0; d < dim; ++d) {
    if (trim(head[first_dim + d]) != "h" + std::to_string(d)) {
      throw Error(ErrorKind::kSchemaError, "latents header column " + std::to_string(first_dim + d + 1) +
                                               " should be 'h" + std::to_string(d) + "'");
    }
  }

  const std::size_t n = lines.size() - 1;
  std::vector<std::string> ids;
  ids.reserve(n);
  std::vector<int> labels;
  Matrix reps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& line = lines[r + 1];
    const auto cells = split(line.text, ',');
    if (cells.size() != head.size()) {
      throw Error(ErrorKind::kRaggedRows, "row " + std::to_string(r + 1) + " (line " +
                                              std::to_string(line.number) + ") has " +
                                              std::to_string(cells.size()) + " columns, expected " +
                                              std::to_string(head.size()));
    }
    ids.emplace_back(trim(cells[0]));
    if (has_label) labels.push_back(parse_int(cells[1], line.number, 2));
    for (std::size_t d = 0; d < dim; ++d) {
      reps(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) =
          parse_number(cells[first_dim + d], line.number, first_dim + d + 1);
    }
  }
  std::optional<std::vector<int>> maybe_labels;
  if (has_label) maybe_labels = std::move(labels);
  return LatentDataset(std::move(ids), std::move(reps), std::move(maybe_labels), truth);
}

std::string latents_to_csv(const LatentDataset& dataset) {
  std::string out = "# format: latents 1\nid";
  if (dataset.has_labels()) out += ",label";
  for (std::size_t d = 0; d < dataset.dim(); ++d) out += ",h" + std::to_string(d);
  out += '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += dataset.ids()[i];
    if (dataset.has_labels()) out += "," + std::to_string(dataset.labels()[i]);
    for (std::size_t d = 0; d < dataset.dim(); ++d) {
      out += ',';
      out += format_double(dataset.reps()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)));
    }
    out += '\n';
  }
  return out;
}

fs::path truth_path_for(const fs::path& latents_path) {
  fs::path p = latents_path;
  p.replace_extension(".truth.json");
  return p;
}

Json concept_truth_to_json(const LatentDataset& dataset) {
  Json doc = header("concept_truth");
  Json concepts = Json::object();
  for (const auto& [name, flags] : dataset.concept_truth()) {
    Json ids = Json::array();
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) ids.push_back(dataset.ids()[i]);
    }
    concepts[name] = std::move(ids);
  }
  doc["concepts"] = std::move(concepts);
  return doc;
}

LatentDataset load_latents(const fs::path& path) {
  const std::string text = read_file(path);
  LatentDataset::ConceptTruth truth;
  const auto truth_file = truth_path_for(path);
  if (fs::exists(truth_file)) {
    // Parse once without annotations to learn the id order.
    const LatentDataset plain = parse_latents_csv(text);
    const Json doc = load_json(truth_file);
    check_header(doc, "concept_truth");
    const Json& concepts = doc.contains("concepts") ? doc["concepts"] : Json();
    if (!concepts.is_object()) throw Error(ErrorKind::kSchemaError, "concept_truth needs a 'concepts' object");
    for (const auto& [name, ids] : concepts.items()) {
      std::vector<bool> flags(plain.size(), false);
      if (!ids.is_array()) throw Error(ErrorKind::kSchemaError, "concept '" + name + "' must list ids");
      for (const auto& id : ids) {
        const auto idx = id.is_string() ? plain.index_of(id.get<std::string>()) : std::nullopt;
        if (!idx) {
          throw Error(ErrorKind::kUnknownId, "concept '" + name + "' truth lists unknown id " + id.dump());
        }
        flags[*idx] = true;
      }
      truth[name] = std::move(flags);
    }
  }
  return parse_latents_csv(text, truth);
}

void save_latents(const fs::path& path, const LatentDataset& dataset) {
  write_file(path, latents_to_csv(dataset));
  if (!dataset.concept_truth().empty()) save_json(truth_path_for(path), concept_truth_to_json(dataset));
}

// ---------------------------------------------------------------------------
// Concept sets

ConceptFile parse_concepts(const Json& doc) {
  check_header(doc, "concept_sets");
  if (!doc.contains("concepts") || !doc["concepts"].is_object()) {
    throw Error(ErrorKind::kSchemaError, "concept_sets needs a 'concepts' object");
  }
  ConceptFile file;
  for (const auto& [name, entry] : doc["concepts"].items()) {
    NamedConceptSets sets;
    sets.positive = field<std::vector<std::string>>(entry, "positive");
    sets.negative = field<std::vector<std::string>>(entry, "negative");
    if (sets.positive.size() != sets.negative.size()) {
      throw Error(ErrorKind::kUnbalancedSets, "concept '" + name + "' has " +
                                                  std::to_string(sets.positive.size()) + " positive and " +
                                                  std::to_string(sets.negative.size()) + " negative ids");
    }
    if (sets.positive.empty()) {
      throw Error(ErrorKind::kInsufficientExamples, "concept '" + name + "' has no examples");
    }
    std::unordered_set<std::string> seen;
    for (const auto* side : {&sets.positive, &sets.negative}) {
      for (const auto& id : *side) {
        if (!seen.insert(id).second) {
          throw Error(ErrorKind::kDuplicateId, "concept '" + name + "' lists id '" + id + "' twice");
        }
      }
    }
    file.emplace(name, std::move(sets));
  }
  return file;
}

ConceptFile load_concepts(const fs::path& path) { return parse_concepts(load_json(path)); }

std::map<std::string, ConceptSets> bind_concepts(const ConceptFile& file,
                                                 const LatentDataset& dataset) {
  std::map<std::string, ConceptSets> out;
  for (const auto& [name, named] : file) {
    ConceptSets sets;
    sets.concept_name = name;
    for (const auto& [ids, target] : {std::pair{&named.positive, &sets.positive},
                                      std::pair{&named.negative, &sets.negative}}) {
      for (const auto& id : *ids) {
        const auto idx = dataset.index_of(id);
        if (!idx) {
          throw Error(ErrorKind::kUnknownId, "concept '" + name + "' references unknown id '" + id + "'");
        }
        target->push_back(*idx);
      }
    }
    sets.validate_against(dataset.size());
    out.emplace(name, std::move(sets));
  }
  return out;
}

Json concepts_to_json(const std::map<std::string, ConceptSets>& sets, const LatentDataset& dataset) {
  Json doc = header("concept_sets");
  Json concepts = Json::object();
  for (const auto& [name, s] : sets) {
    Json entry = Json::object();
    Json pos = Json::array();
    Json neg = Json::array();
    for (Index i : s.positive) pos.push_back(dataset.ids().at(i));
    for (Index i : s.negative) neg.push_back(dataset.ids().at(i));
    entry["positive"] = std::move(pos);
    entry["negative"] = std::move(neg);
    concepts[name] = std::move(entry);
  }
  doc["concepts"] = std::move(concepts);
  return doc;
}

// ---------------------------------------------------------------------------
// Models

Json to_json(const KernelSpec& k) {
  Json j = Json::object();
  j["kind"] = std::string(to_string(k.kind));
  if (k.kind == KernelKind::kGaussianRbf) j["gamma"] = k.gamma;
  return j;
}

KernelSpec kernel_from_json(const Json& j) {
  KernelSpec k;
  try {
    k.kind = parse_kernel_kind(field<std::string>(j, "kind"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchemaError) throw;
    throw Error(ErrorKind::kSchemaError, e.what());
  }
  if (k.kind == KernelKind::kGaussianRbf) {
    k.gamma = field<double>(j, "gamma");
  } else {
    k.gamma = 0.0;
  }
  k.validate();
  return k;
}

Json to_json(const CarClassifier& clf) {
  Json j = header("car_classifier");
  j["concept"] = clf.concept_name;
  j["kernel"] = to_json(clf.kernel);
  j["dim"] = clf.dim();
  j["support_reps"] = matrix_json(clf.support_reps);
  j["dual_coefs"] = vector_json(clf.dual_coefs);
  j["bias"] = clf.bias;
  j["c_penalty"] = clf.c_penalty;
  j["solver"] = {{"converged", clf.converged},
                 {"kkt_violation", clf.kkt_violation},
                 {"iterations", clf.iterations}};
  return j;
}

CarClassifier car_from_json(const Json& j) {
  check_header(j, "car_classifier");
  CarClassifier clf;
  clf.concept_name = field<std::string>(j, "concept");
  clf.kernel = kernel_from_json(field<Json>(j, "kernel"));
  const auto dim = field<std::size_t>(j, "dim");
  clf.support_reps = matrix_from(field<Json>(j, "support_reps"), dim, "support_reps");
  clf.dual_coefs = vector_from(field<Json>(j, "dual_coefs"), "dual_coefs");
  if (clf.dual_coefs.size() != clf.support_reps.rows()) {
    throw Error(ErrorKind::kSchemaError, "dual_coefs length differs from support vector count");
  }
  clf.bias = field<double>(j, "bias");
  clf.c_penalty = field<double>(j, "c_penalty");
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    clf.converged = field<bool>(s, "converged");
    clf.kkt_violation = field<double>(s, "kkt_violation");
    clf.iterations = field<std::size_t>(s, "iterations");
  }
  return clf;
}

Json to_json(const CavClassifier& clf) {
  Json j = header("cav_classifier");
  j["concept"] = clf.concept_name;
  j["weights"] = vector_json(clf.weights);
  j["bias"] = clf.bias;
  j["train_log"] = {{"final_loss", clf.train_log.final_loss},
                    {"epochs_run", clf.train_log.epochs_run}};
  return j;
}

CavClassifier cav_from_json(const Json& j) {
  check_header(j, "cav_classifier");
  CavClassifier clf;
  clf.concept_name = field<std::string>(j, "concept");
  clf.weights = vector_from(field<Json>(j, "weights"), "weights");
  clf.bias = field<double>(j, "bias");
  if (j.contains("train_log")) {
    clf.train_log.final_loss = field<double>(j["train_log"], "final_loss");
    clf.train_log.epochs_run = field<std::size_t>(j["train_log"], "epochs_run");
  }
  return clf;
}

Json to_json(const ConceptDensity& d) {
  Json j = header("concept_density");
  j["concept"] = d.concept_name();
  j["kernel"] = to_json(d.kernel());
  j["dim"] = d.dim();
  j["pos_reps"] = matrix_json(d.pos_reps());
  j["neg_reps"] = matrix_json(d.neg_reps());
  return j;
}

ConceptDensity density_from_json(const Json& j) {
  check_header(j, "concept_density");
  const auto dim = field<std::size_t>(j, "dim");
  return ConceptDensity(field<std::string>(j, "concept"), kernel_from_json(field<Json>(j, "kernel")),
                        matrix_from(field<Json>(j, "pos_reps"), dim, "pos_reps"),
                        matrix_from(field<Json>(j, "neg_reps"), dim, "neg_reps"));
}

Json to_json(const FeedforwardNet& net) {
  Json j = header("feedforward_net");
  j["cut"] = net.cut_index();
  Json layers = Json::array();
  for (const auto& layer : net.layers()) {
    Json l = Json::object();
    l["weights"] = matrix_json(layer.weights);
    l["bias"] = vector_json(layer.bias);
    l["activation"] = std::string(to_string(layer.activation));
    if (layer.activation == Activation::kLeakyRelu) l["slope"] = layer.slope;
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j;
}

FeedforwardNet net_from_json(const Json& j) {
  check_header(j, "feedforward_net");
  const Json layers_json = field<Json>(j, "layers");
  if (!layers_json.is_array()) throw Error(ErrorKind::kSchemaError, "'layers' must be an array");
  std::vector<DenseLayer> layers;
  for (const auto& l : layers_json) {
    DenseLayer layer;
    const Json weights = field<Json>(l, "weights");
    layer.weights = matrix_from(weights, row_width(weights), "weights");
    layer.bias = vector_from(field<Json>(l, "bias"), "bias");
    layer.activation = parse_activation(field<std::string>(l, "activation"));
    if (l.contains("slope")) layer.slope = field<double>(l, "slope");
    layers.push_back(std::move(layer));
  }
  return FeedforwardNet(std::move(layers), field<std::size_t>(j, "cut"));
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const ScoreReport& r) {
  Json j = Json::object();
  j["kind"] = std::string(to_string(r.kind));
  j["concepts"] = r.concepts;
  j["class"] = r.class_index ? Json(*r.class_index) : Json(nullptr);
  j["value"] = r.value;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  j["degenerate"] = r.degenerate;
  j["dataset_fingerprint"] = r.dataset_fingerprint;
  return j;
}

ScoreReport score_from_json(const Json& j) {
  ScoreReport r;
  const auto kind = field<std::string>(j, "kind");
  if (kind == "tcar_class") r.kind = ScoreKind::kTcarClass;
  else if (kind == "tcar_concept") r.kind = ScoreKind::kTcarConcept;
  else if (kind == "tcav") r.kind = ScoreKind::kTcav;
  else throw Error(ErrorKind::kSchemaError, "unknown score kind '" + kind + "'");
  r.concepts = field<std::vector<std::string>>(j, "concepts");
  if (j.contains("class") && !j["class"].is_null()) r.class_index = field<int>(j, "class");
  r.value = field<double>(j, "value");
  r.numerator = field<std::size_t>(j, "numerator");
  r.denominator = field<std::size_t>(j, "denominator");
  r.degenerate = j.value("degenerate", false);
  r.dataset_fingerprint = j.value("dataset_fingerprint", std::string());
  return r;
}

std::string scores_to_jsonl(const std::vector<ScoreReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += to_json(r).dump() + "\n";
  return out;
}

std::string scores_to_csv(const std::vector<ScoreReport>& reports) {
  std::string out = "# format: scores 1\nconcept,class,kind,value,numerator,denominator\n";
  for (const auto& r : reports) {
    std::string concepts;
    for (std::size_t i = 0; i < r.concepts.size(); ++i) concepts += (i ? "&" : "") + r.concepts[i];
    out += csv_escape(concepts) + "," + (r.class_index ? std::to_string(*r.class_index) : "") + "," +
           std::string(to_string(r.kind)) + "," + format_double(r.value) + "," +
           std::to_string(r.numerator) + "," + std::to_string(r.denominator) + "\n";
  }
  return out;
}

Json to_json(const AttributionRecord& r) {
  Json j = Json::object();
  j["example_id"] = r.example_id;
  j["concept"] = r.concept_name;
  j["gamma"] = r.gamma;
  j["scores"] = vector_json(r.result.scores);
  j["completeness_gap"] = r.result.completeness_gap;
  j["target_value"] = r.result.target_value;
  j["baseline_value"] = r.result.baseline_value;
  j["steps"] = r.result.steps;
  j["baseline_kind"] = r.baseline_kind;
  return j;
}

std::string attributions_to_jsonl(const std::vector<AttributionRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::string attributions_to_csv(const std::vector<AttributionRecord>& records) {
  std::string out = "# format: attributions 1\nexample_id,concept";
  const auto width = records.empty() ? 0 : records.front().result.scores.size();
  for (Eigen::Index i = 0; i < width; ++i) out += ",a" + std::to_string(i);
  out += '\n';
  for (const auto& r : records) {
    out += csv_escape(r.example_id) + "," + csv_escape(r.concept_name);
    for (Eigen::Index i = 0; i < r.result.scores.size(); ++i) out += "," + format_double(r.result.scores(i));
    out += '\n';
  }
  return out;
}

Json to_json(const PermutationResult& r, std::string_view concept_name) {
  Json j = header("permutation_test");
  j["concept"] = concept_name;
  j["p_value"] = r.p_value;
  j["observed_accuracy"] = r.observed_accuracy;
  j["n_perm"] = r.permuted_accuracies.size();
  j["permuted_accuracies"] = r.permuted_accuracies;
  return j;
}

Json to_json(const TuneResult& r, const std::vector<TuneCandidate>& candidates) {
  Json j = header("tune_result");
  j["kernel"] = to_json(r.kernel);
  j["c_penalty"] = r.c_penalty;
  j["validation_accuracy"] = r.validation_accuracy;
  Json all = Json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    all.push_back({{"kernel", to_json(candidates[i].kernel)},
                   {"c_penalty", candidates[i].c_penalty},
                   {"validation_accuracy", r.candidate_accuracies.at(i)}});
  }
  j["candidates"] = std::move(all);
  return j;
}

std::string ground_truth_to_csv(const std::vector<GroundTruthRow>& rows) {
  std::string out = "# format: ground_truth 1\nclass,concept,proportion\n";
  for (const auto& r : rows) {
    out += std::to_string(r.class_index) + "," + csv_escape(r.concept_name) + "," +
           format_double(r.proportion) + "\n";
  }
  return out;
}

std::vector<GroundTruthRow> parse_ground_truth_csv(std::string_view text) {
  const auto lines = csv_body(text, "ground_truth");
  if (lines.empty() || trim(lines.front().text) != "class,concept,proportion") {
    throw Error(ErrorKind::kSchemaError, "ground_truth header must be 'class,concept,proportion'");
  }
  std::vector<GroundTruthRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i].text, ',');
    if (cells.size() != 3) {
      throw Error(ErrorKind::kRaggedRows, "ground_truth line " + std::to_string(lines[i].number) +
                                              " has " + std::to_string(cells.size()) + " columns");
    }
    rows.push_back({parse_int(cells[0], lines[i].number, 1), std::string(trim(cells[1])),
                    parse_number(cells[2], lines[i].number, 3)});
  }
  return rows;
}

}  // namespace carprobe::io
