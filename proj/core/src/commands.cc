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
#include "sepq/commands.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "sepq/errors.h"
#include "sepq/evaluate.h"
#include "sepq/quantizer.h"
#include "sepq/separability.h"

namespace sepq {
namespace {

template <typename Fn>
auto InStage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

std::vector<std::int64_t> IdsFromMetadata(const Metadata& metadata, const char* key,
                                          std::size_t expected) {
  if (!metadata.contains(key) || !metadata.at(key).is_array()) return {};
  try {
    auto ids = metadata.at(key).get<std::vector<std::int64_t>>();
    if (ids.size() == expected) return ids;
  } catch (const nlohmann::json::exception&) {
  }
  throw FormatError(std::string("feature dump metadata '") + key + "' must list " +
                    std::to_string(expected) + " integers");
}

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

ScoresReport AnalyzeFeatures(const Container& dump) {
  std::vector<std::string> order;
  if (dump.metadata.contains("layers")) {
    try {
      order = dump.metadata.at("layers").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw FormatError("feature dump metadata 'layers' must be a list of names");
    }
  } else {
    for (const auto& t : dump.tensors) order.push_back(t.name());
  }
  if (order.empty()) throw FormatError("feature dump contains no layers");

  ScoresReport report;
  for (const auto& id : order) {
    const Tensor& fmap = dump.Get(id);
    PooledFeatures pooled = PoolFeatures(fmap, id);
    if (report.layers.empty()) {
      report.images = pooled.images();
    } else if (pooled.images() != report.images) {
      throw ShapeError("feature dump layer '" + id + "' has " +
                       std::to_string(pooled.images()) + " images, expected " +
                       std::to_string(report.images));
    }
    pooled.image_ids = IdsFromMetadata(dump.metadata, "image_ids", pooled.images());
    pooled.class_ids = IdsFromMetadata(dump.metadata, "labels", pooled.images());

    const LayerScore score = ScoreLayer(pooled);
    LayerScoreSummary s;
    s.layer_id = id;
    s.alpha = score.alpha;
    s.features = pooled.features();
    s.images = pooled.images();
    s.total_words = score.words.TotalWords();
    s.min_words = s.features ? pooled.images() : 0;
    for (const auto& m : score.words.members) {
      s.min_words = std::min(s.min_words, m.size());
      s.max_words = std::max(s.max_words, m.size());
      if (m.size() == pooled.images()) ++s.saturated_features;
    }
    report.layers.push_back(std::move(s));
  }
  return report;
}

AllocationReport Allocate(const ScoresReport& scores, std::vector<LayerProfile> profiles,
                          const AllocateOptions& options) {
  if (options.budget.has_value() == options.w8_fraction.has_value()) {
    throw InvalidArgument(
        "allocate: exactly one budget (bytes, megabytes, BOPs or 8-bit fraction) is required");
  }
  if (options.bits.min < kMinQuantBits || options.bits.max > kMaxQuantBits ||
      options.bits.min > options.bits.max) {
    throw InvalidArgument("allocate: bit range must satisfy " + std::to_string(kMinQuantBits) +
                          " <= min <= max <= " + std::to_string(kMaxQuantBits));
  }
  if (profiles.empty()) throw InvalidArgument("allocate: model profile has no layers");

  std::map<std::string, double> alpha_by_id;
  for (const auto& l : scores.layers) {
    if (!alpha_by_id.emplace(l.layer_id, l.alpha).second) {
      throw FormatError("scores report lists layer '" + l.layer_id + "' twice");
    }
  }
  std::set<std::string> profile_ids;
  std::vector<double> alpha;
  for (const auto& p : profiles) {
    if (!profile_ids.insert(p.layer_id).second) {
      throw FormatError("model profile lists layer '" + p.layer_id + "' twice");
    }
    const auto it = alpha_by_id.find(p.layer_id);
    if (it == alpha_by_id.end()) {
      throw InvalidArgument("allocate: profile layer '" + p.layer_id +
                            "' has no separability score");
    }
    alpha.push_back(it->second);
  }
  for (const auto& [id, _] : alpha_by_id) {
    if (!profile_ids.count(id)) {
      throw InvalidArgument("allocate: scored layer '" + id + "' is not in the model profile");
    }
  }

  if (options.pin_first_last) {
    if (!profiles.front().pinned_bits) profiles.front().pinned_bits = kPinnedLayerBits;
    if (!profiles.back().pinned_bits) profiles.back().pinned_bits = kPinnedLayerBits;
  }

  AllocationReport report;
  report.range = options.bits;
  if (options.budget) {
    report.budget = *options.budget;
  } else {
    const std::vector<int> w8(profiles.size(), 8);
    report.budget = Budget::Bytes(*options.w8_fraction * ModelSizeBytes(w8, profiles));
  }
  report.budget.activation_bits = options.activation_bits;
  report.importance = Importance(alpha, options.beta);
  for (const auto& p : profiles) {
    report.layer_ids.push_back(p.layer_id);
    report.pinned.push_back(p.pinned_bits.has_value());
  }
  report.config = SolveLp(report.importance, profiles, report.budget, report.range);
  return report;
}

Container MakeFeatureDump(const ModelGraph& model, const Container& dataset,
                          std::size_t n, std::uint64_t seed) {
  const Tensor& images = dataset.Get("images");
  const Tensor& labels = dataset.Get("labels");
  if (images.rank() != 4 || labels.rank() != 1 || labels.dim(0) != images.dim(0)) {
    throw ShapeError("dataset needs images [N,c,h,w] and labels [N], got " +
                     ShapeToString(images.shape()) + " and " + ShapeToString(labels.shape()));
  }
  const auto total = static_cast<std::size_t>(images.dim(0));
  if (n < 1 || n > total) {
    throw InvalidArgument("cannot sample " + std::to_string(n) + " images from a dataset of " +
                          std::to_string(total));
  }

  // Partial Fisher-Yates on raw engine output.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> index(total);
  for (std::size_t i = 0; i < total; ++i) index[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (total - i));
    std::swap(index[i], index[j]);
  }
  index.resize(n);

  const auto per_image = images.size() / total;
  std::vector<float> batch;
  batch.reserve(n * per_image);
  Metadata image_ids = Metadata::array();
  Metadata class_ids = Metadata::array();
  for (auto idx : index) {
    const auto src = images.data().subspan(idx * per_image, per_image);
    batch.insert(batch.end(), src.begin(), src.end());
    image_ids.push_back(idx);
    class_ids.push_back(std::llround(labels.data()[idx]));
  }
  Shape shape = images.shape();
  shape[0] = static_cast<std::int64_t>(n);

  auto result = Forward(model, Tensor("images", std::move(shape), std::move(batch)), true);
  Container dump;
  dump.tensors = std::move(result.features);
  dump.metadata = Metadata{{"layers", model.QuantizableNames()},
                           {"n", n},
                           {"seed", seed},
                           {"image_ids", std::move(image_ids)},
                           {"labels", std::move(class_ids)}};
  return dump;
}

std::string TableHeader() {
  return "Method | W bit | A bit | Model Size (MB) | BOPs (G) | Top-1 (%)";
}

std::string TableRow(const std::string& method, const SimulationReport& report) {
  const auto& e = report.eval;
  std::string wbit = "-";
  if (!e.layers.empty()) {
    const bool uniform = std::all_of(e.layers.begin(), e.layers.end(), [&](const LayerError& l) {
      return l.bits == e.layers.front().bits;
    });
    wbit = uniform ? std::to_string(e.layers.front().bits) : "mixed";
  }
  return method + " | " + wbit + " | " + std::to_string(e.activation_bits) + " | " +
         Format("%.6g", e.size_bytes / kBytesPerMegabyte) + " | " +
         Format("%.6g", e.bops / 1e9) + " | " + Format("%.2f", 100.0 * e.top1);
}

ScoresReport CmdAnalyze(const std::filesystem::path& features,
                        const std::filesystem::path& out) {
  return InStage("analyze", [&] {
    ScoresReport report = AnalyzeFeatures(ReadContainer(features));
    WriteJson(out, ToJson(report));
    return report;
  });
}

AllocationReport CmdAllocate(const std::filesystem::path& scores,
                             const std::filesystem::path& profile,
                             const AllocateOptions& options,
                             const std::filesystem::path& out) {
  return InStage("allocate", [&] {
    AllocationReport report = Allocate(ReadScores(scores), ReadProfile(profile), options);
    WriteJson(out, ToJson(report));
    return report;
  });
}

SimulationReport CmdSimulate(const std::filesystem::path& model_path,
                             const std::filesystem::path& config_path,
                             const std::filesystem::path& dataset_path,
                             const std::filesystem::path& out) {
  return InStage("simulate", [&] {
    const ModelGraph model = ModelGraph::Load(model_path);
    const AllocationReport config = ReadAllocation(config_path);
    const auto names = model.QuantizableNames();
    if (config.layer_ids != names) {
      throw InvalidArgument("simulate: bit config covers " +
                            std::to_string(config.layer_ids.size()) +
                            " layers but the model has " + std::to_string(names.size()) +
                            " quantizable layers (or their names differ)");
    }
    const Container dataset = ReadContainer(dataset_path);
    SimulationReport report;
    report.eval = EvaluateConfig(model, config.config.bits, dataset.Get("images"),
                                 dataset.Get("labels"), config.budget.activation_bits);
    report.float_top1 = EvaluateFloat(model, dataset.Get("images"), dataset.Get("labels"));
    WriteJson(out, ToJson(report));
    return report;
  });
}

PipelineResult CmdPipeline(const PipelineConfig& config) {
  PipelineResult result;
  InStage("setup", [&] {
    if (config.out_dir.empty()) throw InvalidArgument("pipeline: output directory is required");
    if (config.model.empty() || config.dataset.empty()) {
      throw InvalidArgument("pipeline: --model and --dataset are required");
    }
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create '" + config.out_dir.string() + "': " + ec.message());
  });

  std::filesystem::path features = config.features;
  std::filesystem::path profile = config.profile;
  if (features.empty() || profile.empty()) {
    InStage("prepare", [&] {
      const ModelGraph model = ModelGraph::Load(config.model);
      if (features.empty()) {
        features = config.out_dir / "features.fmap";
        const Container dump =
            MakeFeatureDump(model, ReadContainer(config.dataset), config.samples, config.seed);
        WriteContainer(dump.tensors, dump.metadata, features);
        result.artifacts.push_back(features);
      }
      if (profile.empty()) {
        profile = config.out_dir / "profile.json";
        WriteJson(profile, ToJson(ProfileModel(model, false)));
        result.artifacts.push_back(profile);
      }
    });
  }

  const auto scores = config.out_dir / "scores.json";
  const auto bitconfig = config.out_dir / "config.json";
  const auto eval = config.out_dir / "eval.json";
  result.scores = CmdAnalyze(features, scores);
  result.allocation = CmdAllocate(scores, profile, config.allocate, bitconfig);
  result.simulation = CmdSimulate(config.model, bitconfig, config.dataset, eval);
  result.artifacts.insert(result.artifacts.end(), {scores, bitconfig, eval});
  return result;
}

}  // namespace sepq
