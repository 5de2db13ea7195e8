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
#ifndef SEPQ_ALLOCATOR_H_
#define SEPQ_ALLOCATOR_H_

// Bit-width allocation: turn layer separability into importance weights and
// maximize sum_i theta_i * b_i subject to a model-size or BOPs budget.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sepq {

inline constexpr double kBytesPerMegabyte = 1024.0 * 1024.0;
inline constexpr int kPinnedLayerBits = 8;

struct LayerProfile {
  std::string layer_id;
  std::int64_t param_count = 1;
  std::int64_t mac_count = 0;
  std::optional<int> pinned_bits;
};

struct ImportanceVector {
  std::vector<double> theta;
  double beta = 1.0;
  std::vector<double> alpha;
};

enum class BudgetKind { kModelSizeBytes, kBops };

struct Budget {
  BudgetKind kind = BudgetKind::kModelSizeBytes;
  double limit = 0.0;
  // Only enters the cost for kBops; always used when reporting BOPs.
  int activation_bits = 8;

  static Budget Bytes(double bytes, int activation_bits = 8);
  static Budget Megabytes(double megabytes, int activation_bits = 8);
  static Budget Bops(double bops, int activation_bits);
};

const char* BudgetKindName(BudgetKind kind);

struct BitRange {
  int min = 4;
  int max = 8;
};

struct BitConfig {
  std::vector<int> bits;
  // Continuous LP solution; equals `bits` except at the pivot layer.
  std::vector<double> relaxed_bits;
  double objective = 0.0;
  double relaxed_objective = 0.0;
  double size_bytes = 0.0;
  double bops = 0.0;
  bool feasible = false;
};

// theta_i = exp(beta * alpha_i). Throws InvalidArgument for non-finite alpha
// or when theta overflows (use a smaller beta).
ImportanceVector Importance(std::span<const double> alpha, double beta);

// sum_i param_count_i * bits_i / 8.
double ModelSizeBytes(std::span<const int> bits, std::span<const LayerProfile> profiles);
// sum_i mac_count_i * bits_i * activation_bits.
double Bops(std::span<const int> bits, std::span<const LayerProfile> profiles,
            int activation_bits);

// Cost of one layer per weight bit under the given budget kind.
double CostPerBit(const LayerProfile& profile, const Budget& budget);
double BudgetCost(std::span<const int> bits, std::span<const LayerProfile> profiles,
                  const Budget& budget);

// Exact solver for the continuous relaxation (a bounded fractional
// knapsack). Free layers start at bits.min and are raised to bits.max in
// decreasing order of theta / cost-per-bit, ties to the lower index. At
// most one pivot layer ends fractional; its integer bit-width is floored.
// Pinned layers keep their bit-width and count against the budget.
//
// Throws InvalidArgument on malformed inputs and InfeasibleBudget when the
// budget cannot cover every free layer at bits.min.
BitConfig SolveLp(const ImportanceVector& importance,
                  std::span<const LayerProfile> profiles, const Budget& budget,
                  BitRange bits);

inline constexpr std::size_t kMaxBruteForceLayers = 8;

// Exhaustive integer search used as a test oracle. Among optimal
// configurations the lexicographically smallest bit vector wins.
BitConfig BruteForceAllocation(const ImportanceVector& importance,
                               std::span<const LayerProfile> profiles,
                               const Budget& budget, BitRange bits);

}  // namespace sepq

#endif  // SEPQ_ALLOCATOR_H_
