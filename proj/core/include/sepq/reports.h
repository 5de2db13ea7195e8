/* Copyright 2026 The sepq Authors. All Rights Reserved.

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
#ifndef SEPQ_REPORTS_H_
#define SEPQ_REPORTS_H_

// JSON artifacts exchanged between pipeline stages. Keys are written in a
// fixed order with no timestamps. Schemas are in docs/formats.md.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepq/allocator.h"
#include "sepq/evaluate.h"

namespace sepq {

using Json = nlohmann::ordered_json;

struct LayerScoreSummary {
  std::string layer_id;
  double alpha = 0.0;
  std::size_t features = 0;
  std::size_t images = 0;
  std::size_t total_words = 0;
  std::size_t min_words = 0;
  std::size_t max_words = 0;
  // Features whose word set covers every image (idf == 0).
  std::size_t saturated_features = 0;
};

struct ScoresReport {
  std::size_t images = 0;
  std::vector<LayerScoreSummary> layers;
};

struct AllocationReport {
  std::vector<std::string> layer_ids;
  std::vector<bool> pinned;
  ImportanceVector importance;
  BitRange range;
  Budget budget;
  BitConfig config;
};

struct SimulationReport {
  EvalReport eval;
  double float_top1 = 0.0;
};

Json ToJson(const ScoresReport& report);
Json ToJson(const std::vector<LayerProfile>& profiles);
Json ToJson(const AllocationReport& report);
Json ToJson(const SimulationReport& report);

ScoresReport ScoresFromJson(const Json& json);
std::vector<LayerProfile> ProfilesFromJson(const Json& json);
AllocationReport AllocationFromJson(const Json& json);

// Pretty-printed JSON plus trailing newline.
void WriteJson(const std::filesystem::path& path, const Json& json);
// Throws IoError / FormatError.
Json ReadJson(const std::filesystem::path& path);

ScoresReport ReadScores(const std::filesystem::path& path);
std::vector<LayerProfile> ReadProfile(const std::filesystem::path& path);
AllocationReport ReadAllocation(const std::filesystem::path& path);

}  // namespace sepq

#endif  // SEPQ_REPORTS_H_
