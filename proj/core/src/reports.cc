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
#include "sepq/reports.h"

#include "sepq/errors.h"
#include "sepq/feature_store.h"

namespace sepq {
namespace {

constexpr const char* kScoresFormat = "sepq.scores";
constexpr const char* kProfileFormat = "sepq.profile";
constexpr const char* kBitConfigFormat = "sepq.bitconfig";
constexpr const char* kEvalFormat = "sepq.eval";
constexpr int kReportVersion = 1;

Json Header(const char* format) {
  return Json{{"format", format}, {"version", kReportVersion}};
}

void ExpectFormat(const Json& json, const char* format) {
  if (!json.is_object() || json.value("format", std::string()) != format) {
    throw FormatError(std::string("expected a '") + format + "' document");
  }
  if (json.value("version", 0) != kReportVersion) {
    throw FormatError(std::string("unsupported '") + format + "' version");
  }
}

BudgetKind ParseBudgetKind(const std::string& s) {
  if (s == "bops") return BudgetKind::kBops;
  if (s == "model_size_bytes") return BudgetKind::kModelSizeBytes;
  throw FormatError("unknown budget kind '" + s + "'");
}

template <typename Fn>
auto Parsing(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json ToJson(const ScoresReport& report) {
  Json json = Header(kScoresFormat);
  json["images"] = report.images;
  Json layers = Json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"layer_id", l.layer_id},
                      {"alpha", l.alpha},
                      {"features", l.features},
                      {"images", l.images},
                      {"total_words", l.total_words},
                      {"min_words", l.min_words},
                      {"max_words", l.max_words},
                      {"saturated_features", l.saturated_features}});
  }
  json["layers"] = std::move(layers);
  return json;
}

ScoresReport ScoresFromJson(const Json& json) {
  ExpectFormat(json, kScoresFormat);
  return Parsing("scores report", [&] {
    ScoresReport report;
    report.images = json.at("images").get<std::size_t>();
    for (const auto& l : json.at("layers")) {
      LayerScoreSummary s;
      s.layer_id = l.at("layer_id").get<std::string>();
      s.alpha = l.at("alpha").get<double>();
      s.features = l.value("features", std::size_t{0});
      s.images = l.value("images", std::size_t{0});
      s.total_words = l.value("total_words", std::size_t{0});
      s.min_words = l.value("min_words", std::size_t{0});
      s.max_words = l.value("max_words", std::size_t{0});
      s.saturated_features = l.value("saturated_features", std::size_t{0});
      report.layers.push_back(std::move(s));
    }
    return report;
  });
}

Json ToJson(const std::vector<LayerProfile>& profiles) {
  Json json = Header(kProfileFormat);
  Json layers = Json::array();
  for (const auto& p : profiles) {
    Json l = {{"layer_id", p.layer_id},
              {"param_count", p.param_count},
              {"mac_count", p.mac_count}};
    if (p.pinned_bits) l["pinned_bits"] = *p.pinned_bits;
    layers.push_back(std::move(l));
  }
  json["layers"] = std::move(layers);
  return json;
}

std::vector<LayerProfile> ProfilesFromJson(const Json& json) {
  ExpectFormat(json, kProfileFormat);
  return Parsing("model profile", [&] {
    std::vector<LayerProfile> profiles;
    for (const auto& l : json.at("layers")) {
      LayerProfile p;
      p.layer_id = l.at("layer_id").get<std::string>();
      p.param_count = l.at("param_count").get<std::int64_t>();
      p.mac_count = l.at("mac_count").get<std::int64_t>();
      if (l.contains("pinned_bits") && !l.at("pinned_bits").is_null()) {
        p.pinned_bits = l.at("pinned_bits").get<int>();
      }
      if (p.param_count < 1 || p.mac_count < 0) {
        throw FormatError("profile layer '" + p.layer_id +
                          "' needs param_count >= 1 and mac_count >= 0");
      }
      profiles.push_back(std::move(p));
    }
    return profiles;
  });
}

Json ToJson(const AllocationReport& report) {
  const auto& c = report.config;
  Json json = Header(kBitConfigFormat);
  json["beta"] = report.importance.beta;
  json["bit_range"] = {report.range.min, report.range.max};
  json["budget"] = {{"kind", BudgetKindName(report.budget.kind)},
                    {"limit", report.budget.limit},
                    {"activation_bits", report.budget.activation_bits}};
  Json layers = Json::array();
  for (std::size_t i = 0; i < report.layer_ids.size(); ++i) {
    layers.push_back({{"layer_id", report.layer_ids[i]},
                      {"alpha", report.importance.alpha[i]},
                      {"theta", report.importance.theta[i]},
                      {"pinned", static_cast<bool>(report.pinned[i])},
                      {"bits", c.bits[i]},
                      {"relaxed_bits", c.relaxed_bits[i]}});
  }
  json["layers"] = std::move(layers);
  json["bits"] = c.bits;
  json["objective"] = c.objective;
  json["relaxed_objective"] = c.relaxed_objective;
  json["size_bytes"] = c.size_bytes;
  json["size_mb"] = c.size_bytes / kBytesPerMegabyte;
  json["bops"] = c.bops;
  json["feasible"] = c.feasible;
  return json;
}

AllocationReport AllocationFromJson(const Json& json) {
  ExpectFormat(json, kBitConfigFormat);
  return Parsing("bit config", [&] {
    AllocationReport r;
    r.importance.beta = json.at("beta").get<double>();
    const auto range = json.at("bit_range").get<std::vector<int>>();
    if (range.size() != 2) throw FormatError("bit_range must have two entries");
    r.range = {range[0], range[1]};
    const auto& b = json.at("budget");
    r.budget.kind = ParseBudgetKind(b.at("kind").get<std::string>());
    r.budget.limit = b.at("limit").get<double>();
    r.budget.activation_bits = b.at("activation_bits").get<int>();
    for (const auto& l : json.at("layers")) {
      r.layer_ids.push_back(l.at("layer_id").get<std::string>());
      r.pinned.push_back(l.at("pinned").get<bool>());
      r.importance.alpha.push_back(l.at("alpha").get<double>());
      r.importance.theta.push_back(l.at("theta").get<double>());
      r.config.bits.push_back(l.at("bits").get<int>());
      r.config.relaxed_bits.push_back(l.at("relaxed_bits").get<double>());
    }
    r.config.objective = json.at("objective").get<double>();
    r.config.relaxed_objective = json.at("relaxed_objective").get<double>();
    r.config.size_bytes = json.at("size_bytes").get<double>();
    r.config.bops = json.at("bops").get<double>();
    r.config.feasible = json.at("feasible").get<bool>();
    if (json.at("bits").get<std::vector<int>>() != r.config.bits) {
      throw FormatError("bit config: 'bits' disagrees with per-layer entries");
    }
    return r;
  });
}

Json ToJson(const SimulationReport& report) {
  const auto& e = report.eval;
  Json json = Header(kEvalFormat);
  json["samples"] = e.samples;
  json["activation_bits"] = e.activation_bits;
  json["top1"] = e.top1;
  json["float_top1"] = report.float_top1;
  json["size_bytes"] = e.size_bytes;
  json["size_mb"] = e.size_bytes / kBytesPerMegabyte;
  json["bops"] = e.bops;
  json["bops_g"] = e.bops / 1e9;
  Json layers = Json::array();
  for (const auto& l : e.layers) {
    layers.push_back({{"layer_id", l.layer_id}, {"bits", l.bits}, {"mse", l.mse}});
  }
  json["layers"] = std::move(layers);
  return json;
}

void WriteJson(const std::filesystem::path& path, const Json& json) {
  WriteFileBytes(path, json.dump(2) + "\n");
}

Json ReadJson(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template <typename Fn>
static auto WithPath(const std::filesystem::path& path, Fn&& fn) {
  const Json json = ReadJson(path);
  try {
    return fn(json);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ScoresReport ReadScores(const std::filesystem::path& path) {
  return WithPath(path, [](const Json& j) { return ScoresFromJson(j); });
}

std::vector<LayerProfile> ReadProfile(const std::filesystem::path& path) {
  return WithPath(path, [](const Json& j) { return ProfilesFromJson(j); });
}

AllocationReport ReadAllocation(const std::filesystem::path& path) {
  return WithPath(path, [](const Json& j) { return AllocationFromJson(j); });
}

}  // namespace sepq
