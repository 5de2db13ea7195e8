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
// sepq: separability-driven mixed-precision bit allocation.
//
//   sepq analyze  --features dump.fmap --out scores.json
//   sepq allocate --scores scores.json --profile profile.json --budget-mb 6.7 --out config.json
//   sepq simulate --model model.json --config config.json --dataset data.fmap --out eval.json
//   sepq pipeline --model model.json --dataset data.fmap --budget-fraction 0.6 --out-dir run/
//   sepq profile  --model model.json --out profile.json
//
// Exit codes: 0 success, 1 invalid input, 2 I/O error, 3 infeasible budget.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sepq/commands.h"
#include "sepq/errors.h"
#include "sepq/reports.h"

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;
constexpr int kExitInfeasible = 3;

struct BudgetFlags {
  std::optional<double> bytes;
  std::optional<double> megabytes;
  std::optional<double> bops;
  std::optional<double> fraction;
};

void AddAllocateFlags(CLI::App* cmd, sepq::AllocateOptions& opts, BudgetFlags& budget,
                      std::string& bits) {
  cmd->add_option("--beta", opts.beta, "Importance sharpness in exp(beta * alpha)")
      ->capture_default_str();
  cmd->add_option("--bits", bits, "Search range MIN:MAX")->capture_default_str();
  auto* b1 = cmd->add_option("--budget-bytes", budget.bytes, "Model size budget in bytes");
  auto* b2 = cmd->add_option("--budget-mb", budget.megabytes,
                             "Model size budget in MB (1 MB = 2^20 bytes)");
  auto* b3 = cmd->add_option("--budget-bops", budget.bops, "BOPs budget");
  auto* b4 = cmd->add_option("--budget-fraction", budget.fraction,
                             "Size budget as a fraction of the uniform 8-bit model");
  for (auto* a : {b1, b2, b3, b4}) {
    for (auto* b : {b1, b2, b3, b4}) {
      if (a != b) a->excludes(b);
    }
  }
  cmd->add_option("--act-bits", opts.activation_bits, "Fixed activation bit-width")
      ->capture_default_str()
      ->check(CLI::Range(1, 32));
  cmd->add_flag("--pin-first-last,!--no-pin-first-last", opts.pin_first_last,
                "Fix the first and last layer at 8 bits")
      ->capture_default_str();
}

void FinishAllocateOptions(sepq::AllocateOptions& opts, const BudgetFlags& budget,
                           const std::string& bits) {
  const auto colon = bits.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(bits);
    opts.bits.min = std::stoi(bits.substr(0, colon));
    opts.bits.max = std::stoi(bits.substr(colon + 1));
  } catch (const std::exception&) {
    throw sepq::InvalidArgument("--bits expects MIN:MAX, got '" + bits + "'");
  }
  if (budget.bytes) opts.budget = sepq::Budget::Bytes(*budget.bytes, opts.activation_bits);
  if (budget.megabytes) {
    opts.budget = sepq::Budget::Megabytes(*budget.megabytes, opts.activation_bits);
  }
  if (budget.bops) opts.budget = sepq::Budget::Bops(*budget.bops, opts.activation_bits);
  if (budget.fraction) opts.w8_fraction = *budget.fraction;
}

void PrintAllocation(const sepq::AllocationReport& r) {
  const auto& c = r.config;
  std::printf("bits:");
  for (int b : c.bits) std::printf(" %d", b);
  std::printf("\nobjective: %.6f (relaxed %.6f)\n", c.objective, c.relaxed_objective);
  std::printf("size: %.0f bytes (%.6g MB), budget %s %.17g\n", c.size_bytes,
              c.size_bytes / sepq::kBytesPerMegabyte, sepq::BudgetKindName(r.budget.kind),
              r.budget.limit);
  std::printf("bops: %.6g G (W*A%d)\n", c.bops / 1e9, r.budget.activation_bits);
}

void PrintSimulation(const sepq::SimulationReport& r) {
  std::printf("%s\n%s\n", sepq::TableHeader().c_str(), sepq::TableRow("sepq", r).c_str());
  std::printf("float top-1: %.2f%% on %zu samples\n", 100.0 * r.float_top1, r.eval.samples);
}

int ReportError(const sepq::Error& e) {
  int code = kExitInvalid;
  std::string extra;
  if (dynamic_cast<const sepq::IoError*>(&e)) code = kExitIo;
  if (const auto* inf = dynamic_cast<const sepq::InfeasibleBudget*>(&e)) {
    code = kExitInfeasible;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " minimum=%.17g", inf->minimum_cost());
    extra = buf;
  }
  std::cerr << "error: stage=" << (e.stage().empty() ? "cli" : e.stage())
            << " kind=" << e.kind() << " code=" << code << extra << " message=\""
            << e.what() << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separability-driven mixed-precision bit allocation"};
  app.require_subcommand(1);

  std::string features, out, scores, profile, model, config, dataset, out_dir;
  std::string bits = "4:8";
  sepq::AllocateOptions opts;
  BudgetFlags budget;
  sepq::PipelineConfig pipeline;
  bool profile_pins = false;

  auto* analyze = app.add_subcommand("analyze", "Score per-layer class separability");
  analyze->add_option("--features", features, "Feature dump (.fmap)")->required();
  analyze->add_option("--out", out, "Scores report to write")->required();

  auto* allocate = app.add_subcommand("allocate", "Solve for per-layer weight bit-widths");
  allocate->add_option("--scores", scores, "Scores report")->required();
  allocate->add_option("--profile", profile, "Model profile")->required();
  allocate->add_option("--out", out, "Bit config to write")->required();
  AddAllocateFlags(allocate, opts, budget, bits);

  auto* simulate = app.add_subcommand("simulate", "Fake-quantize and evaluate a bit config");
  simulate->add_option("--model", model, "Model description (.json)")->required();
  simulate->add_option("--config", config, "Bit config")->required();
  simulate->add_option("--dataset", dataset, "Dataset container (.fmap)")->required();
  simulate->add_option("--out", out, "Evaluation report to write")->required();

  auto* run = app.add_subcommand("pipeline", "analyze -> allocate -> simulate");
  run->add_option("--model", model, "Model description (.json)")->required();
  run->add_option("--dataset", dataset, "Dataset container (.fmap)")->required();
  run->add_option("--features", features, "Existing feature dump; sampled if omitted");
  run->add_option("--profile", profile, "Existing model profile; derived if omitted");
  run->add_option("--out-dir", out_dir, "Directory for all artifacts")->required();
  run->add_option("-n,--samples", pipeline.samples, "Images to sample for the dump")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", pipeline.seed, "Sampling seed")->capture_default_str();
  AddAllocateFlags(run, opts, budget, bits);

  auto* prof = app.add_subcommand("profile", "Write the parameter/MAC profile of a model");
  prof->add_option("--model", model, "Model description (.json)")->required();
  prof->add_option("--out", out, "Profile to write")->required();
  prof->add_flag("--pin-first-last", profile_pins, "Record 8-bit pins for first and last");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const auto report = sepq::CmdAnalyze(features, out);
      for (const auto& l : report.layers) {
        std::printf("%s alpha=%.9g words=%zu/%zu\n", l.layer_id.c_str(), l.alpha,
                    l.total_words, l.features * l.images);
      }
    } else if (*allocate) {
      FinishAllocateOptions(opts, budget, bits);
      PrintAllocation(sepq::CmdAllocate(scores, profile, opts, out));
    } else if (*simulate) {
      PrintSimulation(sepq::CmdSimulate(model, config, dataset, out));
    } else if (*run) {
      FinishAllocateOptions(opts, budget, bits);
      pipeline.model = model;
      pipeline.dataset = dataset;
      pipeline.features = features;
      pipeline.profile = profile;
      pipeline.out_dir = out_dir;
      pipeline.allocate = opts;
      const auto result = sepq::CmdPipeline(pipeline);
      PrintAllocation(result.allocation);
      PrintSimulation(result.simulation);
    } else if (*prof) {
      sepq::WriteJson(out, sepq::ToJson(sepq::ProfileModel(sepq::ModelGraph::Load(model),
                                                           profile_pins)));
    }
  } catch (const sepq::Error& e) {
    return ReportError(e);
  }
  return 0;
}
