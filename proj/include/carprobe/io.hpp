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

#ifndef CARPROBE_IO_HPP_
#define CARPROBE_IO_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "carprobe/attribution.hpp"
#include "carprobe/core.hpp"
#include "carprobe/density.hpp"
#include "carprobe/linear_probe.hpp"
#include "carprobe/net.hpp"
#include "carprobe/scores.hpp"
#include "carprobe/svc.hpp"
#include "carprobe/synth.hpp"

namespace carprobe::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Latents: CSV with a "# format: latents 1" first line, then the header
// id[,label],h0,...,h{d-1}. Concept annotations live in the sibling file
// <stem>.truth.json listing, per concept, the ids where it is present.

LatentDataset parse_latents_csv(std::string_view text,
                                const LatentDataset::ConceptTruth& truth = {});
std::string latents_to_csv(const LatentDataset& dataset);

fs::path truth_path_for(const fs::path& latents_path);
LatentDataset load_latents(const fs::path& path);
void save_latents(const fs::path& path, const LatentDataset& dataset);

Json concept_truth_to_json(const LatentDataset& dataset);

// ---------------------------------------------------------------------------
// Concept sets, addressed by example id until bound to a dataset.

struct NamedConceptSets {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
};
using ConceptFile = std::map<std::string, NamedConceptSets>;

/// Validates balance and duplicates; ids are checked later by bind_concepts.
ConceptFile parse_concepts(const Json& doc);
ConceptFile load_concepts(const fs::path& path);
std::map<std::string, ConceptSets> bind_concepts(const ConceptFile& file,
                                                 const LatentDataset& dataset);
Json concepts_to_json(const std::map<std::string, ConceptSets>& sets, const LatentDataset& dataset);

// ---------------------------------------------------------------------------
// Model artifacts.

Json to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const Json& j);

Json to_json(const CarClassifier& clf);
CarClassifier car_from_json(const Json& j);

Json to_json(const CavClassifier& clf);
CavClassifier cav_from_json(const Json& j);

Json to_json(const ConceptDensity& d);
ConceptDensity density_from_json(const Json& j);

Json to_json(const FeedforwardNet& net);
FeedforwardNet net_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Reports.

Json to_json(const ScoreReport& r);
ScoreReport score_from_json(const Json& j);
std::string scores_to_jsonl(const std::vector<ScoreReport>& reports);
std::string scores_to_csv(const std::vector<ScoreReport>& reports);

struct AttributionRecord {
  std::string example_id;
  std::string concept_name;
  double gamma = 0.0;
  std::string baseline_kind;
  AttributionResult result;
};
Json to_json(const AttributionRecord& r);
std::string attributions_to_jsonl(const std::vector<AttributionRecord>& records);
std::string attributions_to_csv(const std::vector<AttributionRecord>& records);

Json to_json(const PermutationResult& r, std::string_view concept_name);
Json to_json(const TuneResult& r, const std::vector<TuneCandidate>& candidates);

std::string ground_truth_to_csv(const std::vector<GroundTruthRow>& rows);
std::vector<GroundTruthRow> parse_ground_truth_csv(std::string_view text);

// ---------------------------------------------------------------------------
// Files.

/// Parses a JSON document; malformed or truncated input raises kSchemaError.
Json parse_json(std::string_view text, std::string_view origin = "<memory>");
/// Checks {"format": name, "version": 1}.
void check_header(const Json& doc, std::string_view format);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view content);
Json load_json(const fs::path& path);
/// Pretty-printed with sorted keys and a trailing newline.
void save_json(const fs::path& path, const Json& doc);
std::string dump_json(const Json& doc);

}  // namespace carprobe::io

#endif  // CARPROBE_IO_HPP_
