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
#ifndef SEPQ_COMMANDS_H_
#define SEPQ_COMMANDS_H_

// The analyze -> allocate -> simulate pipeline behind the `sepq` tool.
// Each Cmd* function reads its inputs from disk, writes its artifact and
// returns the in-memory result. Errors are sepq::Error subclasses tagged
// with the stage that raised them.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sepq/allocator.h"
#include "sepq/feature_store.h"
#include "sepq/model.h"
#include "sepq/reports.h"

namespace sepq {

inline constexpr std::size_t kDefaultSampleCount = 32;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct AllocateOptions {
  double beta = 1.0;
  BitRange bits{4, 8};
  // Budget in bytes, megabytes or BOPs. Alternatively `w8_fraction` sets a
  // size budget as a fraction of the uniform 8-bit model size. Exactly one
  // of the two is required.
  std::optional<Budget> budget;
  std::optional<double> w8_fraction;
  int activation_bits = 8;
  bool pin_first_last = true;
};

// Scores every layer in a feature dump. Layers are taken in the order of
// the dump's "layers" metadata, or in entry order when it is absent.
ScoresReport AnalyzeFeatures(const Container& dump);

// Applies the pinning policy, matches layers by id and solves the LP.
AllocationReport Allocate(const ScoresReport& scores, std::vector<LayerProfile> profiles,
                          const AllocateOptions& options);

// Draws `n` distinct dataset images with a seeded mt19937_64 and records the
// post-activation feature maps of each quantizable layer.
Container MakeFeatureDump(const ModelGraph& model, const Container& dataset,
                          std::size_t n, std::uint64_t seed);

// "Method | W bit | A bit | Model Size (MB) | BOPs (G) | Top-1 (%)".
std::string TableHeader();
std::string TableRow(const std::string& method, const SimulationReport& report);

ScoresReport CmdAnalyze(const std::filesystem::path& features,
                        const std::filesystem::path& out);
AllocationReport CmdAllocate(const std::filesystem::path& scores,
                             const std::filesystem::path& profile,
                             const AllocateOptions& options,
                             const std::filesystem::path& out);
SimulationReport CmdSimulate(const std::filesystem::path& model,
                             const std::filesystem::path& config,
                             const std::filesystem::path& dataset,
                             const std::filesystem::path& out);

struct PipelineConfig {
  // Existing feature dump; when empty one is sampled from `dataset`.
  std::filesystem::path features;
  // Existing model profile; when empty it is derived from `model`.
  std::filesystem::path profile;
  std::filesystem::path model;
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  AllocateOptions allocate;
  std::size_t samples = kDefaultSampleCount;
  std::uint64_t seed = kDefaultSeed;
};

struct PipelineResult {
  ScoresReport scores;
  AllocationReport allocation;
  SimulationReport simulation;
  std::vector<std::filesystem::path> artifacts;
};

PipelineResult CmdPipeline(const PipelineConfig& config);

}  // namespace sepq

#endif  // SEPQ_COMMANDS_H_
