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
#include "sepq/allocator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sepq/errors.h"

namespace sepq {

Budget Budget::Bytes(double bytes, int activation_bits) {
  return {BudgetKind::kModelSizeBytes, bytes, activation_bits};
}

Budget Budget::Megabytes(double megabytes, int activation_bits) {
  return {BudgetKind::kModelSizeBytes, megabytes * kBytesPerMegabyte, activation_bits};
}

Budget Budget::Bops(double bops, int activation_bits) {
  return {BudgetKind::kBops, bops, activation_bits};
}

const char* BudgetKindName(BudgetKind kind) {
  return kind == BudgetKind::kBops ? "bops" : "model_size_bytes";
}

ImportanceVector Importance(std::span<const double> alpha, double beta) {
  if (!std::isfinite(beta)) throw InvalidArgument("importance: beta must be finite");
  ImportanceVector out;
  out.beta = beta;
  out.alpha.assign(alpha.begin(), alpha.end());
  out.theta.reserve(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!std::isfinite(alpha[i])) {
      throw InvalidArgument("importance: alpha[" + std::to_string(i) + "] is not finite");
    }
    const double theta = std::exp(beta * alpha[i]);
    if (!std::isfinite(theta) || theta <= 0.0) {
      std::ostringstream os;
      os << "importance: exp(beta * alpha[" << i << "]) = exp(" << beta * alpha[i]
         << ") is out of range; use a smaller --beta";
      throw InvalidArgument(os.str());
    }
    out.theta.push_back(theta);
  }
  return out;
}

static void CheckLengths(std::size_t bits, std::size_t profiles) {
  if (bits != profiles) {
    throw InvalidArgument("bit vector has " + std::to_string(bits) +
                          " entries but profile has " + std::to_string(profiles) +
                          " layers");
  }
}

double ModelSizeBytes(std::span<const int> bits, std::span<const LayerProfile> profiles) {
  CheckLengths(bits.size(), profiles.size());
  double bit_total = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bit_total += static_cast<double>(profiles[i].param_count) * bits[i];
  }
  return bit_total / 8.0;
}

double Bops(std::span<const int> bits, std::span<const LayerProfile> profiles,
            int activation_bits) {
  CheckLengths(bits.size(), profiles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    total += static_cast<double>(profiles[i].mac_count) * bits[i];
  }
  return total * activation_bits;
}

double CostPerBit(const LayerProfile& profile, const Budget& budget) {
  if (budget.kind == BudgetKind::kBops) {
    return static_cast<double>(profile.mac_count) * budget.activation_bits;
  }
  return static_cast<double>(profile.param_count) / 8.0;
}

double BudgetCost(std::span<const int> bits, std::span<const LayerProfile> profiles,
                  const Budget& budget) {
  return budget.kind == BudgetKind::kBops
             ? Bops(bits, profiles, budget.activation_bits)
             : ModelSizeBytes(bits, profiles);
}

namespace {

void ValidateProblem(const ImportanceVector& importance,
                     std::span<const LayerProfile> profiles, const Budget& budget,
                     BitRange bits) {
  if (importance.theta.size() != profiles.size()) {
    throw InvalidArgument("allocator: " + std::to_string(importance.theta.size()) +
                          " importance values for " + std::to_string(profiles.size()) +
                          " layers");
  }
  if (bits.min < 1 || bits.min > bits.max) {
    throw InvalidArgument("allocator: invalid bit range " + std::to_string(bits.min) +
                          ":" + std::to_string(bits.max));
  }
  if (!(budget.limit > 0.0) || !std::isfinite(budget.limit)) {
    throw InvalidArgument("allocator: budget limit must be positive and finite");
  }
  if (budget.activation_bits < 0) {
    throw InvalidArgument("allocator: activation bits must be nonnegative");
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    if (p.param_count < 1 || p.mac_count < 0) {
      throw InvalidArgument("allocator: layer '" + p.layer_id +
                            "' needs param_count >= 1 and mac_count >= 0");
    }
    if (p.pinned_bits && *p.pinned_bits < 1) {
      throw InvalidArgument("allocator: layer '" + p.layer_id + "' has invalid pinned bits");
    }
    if (!(importance.theta[i] > 0.0) || !std::isfinite(importance.theta[i])) {
      throw InvalidArgument("allocator: theta for layer '" + p.layer_id +
                            "' must be positive and finite");
    }
  }
}

std::vector<int> FloorConfiguration(std::span<const LayerProfile> profiles, BitRange bits) {
  std::vector<int> out(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    out[i] = profiles[i].pinned_bits.value_or(bits.min);
  }
  return out;
}

[[noreturn]] void ThrowInfeasible(double minimum, const Budget& budget) {
  std::ostringstream os;
  os.precision(17);
  os << "budget " << budget.limit << " (" << BudgetKindName(budget.kind)
     << ") is below the minimum achievable " << minimum;
  if (budget.kind == BudgetKind::kModelSizeBytes) {
    os << " bytes (" << minimum / kBytesPerMegabyte << " MB)";
  }
  throw InfeasibleBudget(os.str(), minimum);
}

double Objective(std::span<const double> theta, std::span<const int> bits) {
  double total = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) total += theta[i] * bits[i];
  return total;
}

void FillAccounting(BitConfig& config, std::span<const LayerProfile> profiles,
                    const Budget& budget) {
  config.size_bytes = ModelSizeBytes(config.bits, profiles);
  config.bops = Bops(config.bits, profiles, budget.activation_bits);
  config.feasible = BudgetCost(config.bits, profiles, budget) <= budget.limit;
}

}  // namespace

BitConfig SolveLp(const ImportanceVector& importance,
                  std::span<const LayerProfile> profiles, const Budget& budget,
                  BitRange bits) {
  ValidateProblem(importance, profiles, budget, bits);
  const auto& theta = importance.theta;

  BitConfig config;
  config.bits = FloorConfiguration(profiles, bits);
  const double minimum = BudgetCost(config.bits, profiles, budget);
  if (minimum > budget.limit) ThrowInfeasible(minimum, budget);
  config.relaxed_bits.assign(config.bits.begin(), config.bits.end());

  std::vector<std::size_t> free_layers;
  std::vector<double> cost_per_bit(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    cost_per_bit[i] = CostPerBit(profiles[i], budget);
    if (!profiles[i].pinned_bits) free_layers.push_back(i);
  }
  // Decreasing theta / cost-per-bit, cross-multiplied; zero-cost layers first.
  std::stable_sort(free_layers.begin(), free_layers.end(),
                   [&](std::size_t a, std::size_t b) {
                     return theta[a] * cost_per_bit[b] > theta[b] * cost_per_bit[a];
                   });

  double remaining = budget.limit - minimum;
  const int span = bits.max - bits.min;
  for (std::size_t idx : free_layers) {
    const double full = span * cost_per_bit[idx];
    if (full <= remaining) {
      config.bits[idx] = bits.max;
      config.relaxed_bits[idx] = bits.max;
      remaining -= full;
      continue;
    }
    // Pivot: fractional in the relaxation, floored in the integer config.
    const double extra = remaining / cost_per_bit[idx];
    config.relaxed_bits[idx] = bits.min + extra;
    int whole = static_cast<int>(std::floor(extra));
    config.bits[idx] = bits.min + whole;
    while (whole > 0 && BudgetCost(config.bits, profiles, budget) > budget.limit) {
      --whole;
      config.bits[idx] = bits.min + whole;
    }
    break;
  }
  // Back off the least dense raised layers if rounding overshot the limit.
  for (auto it = free_layers.rbegin();
       it != free_layers.rend() && BudgetCost(config.bits, profiles, budget) > budget.limit;) {
    if (config.bits[*it] > bits.min) {
      --config.bits[*it];
    } else {
      ++it;
    }
  }

  config.objective = Objective(theta, config.bits);
  config.relaxed_objective = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    config.relaxed_objective += theta[i] * config.relaxed_bits[i];
  }
  FillAccounting(config, profiles, budget);
  return config;
}

BitConfig BruteForceAllocation(const ImportanceVector& importance,
                               std::span<const LayerProfile> profiles,
                               const Budget& budget, BitRange bits) {
  ValidateProblem(importance, profiles, budget, bits);
  std::vector<std::size_t> free_layers;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (!profiles[i].pinned_bits) free_layers.push_back(i);
  }
  if (free_layers.size() > kMaxBruteForceLayers) {
    throw InvalidArgument("brute_force_allocation: " + std::to_string(free_layers.size()) +
                          " free layers exceeds the limit of " +
                          std::to_string(kMaxBruteForceLayers));
  }

  std::vector<int> current = FloorConfiguration(profiles, bits);
  const double minimum = BudgetCost(current, profiles, budget);
  if (minimum > budget.limit) ThrowInfeasible(minimum, budget);

  BitConfig best;
  bool found = false;
  // Odometer over free layers, first layer most significant. Ties keep the
  // lexicographically smallest configuration.
  while (true) {
    if (BudgetCost(current, profiles, budget) <= budget.limit) {
      const double value = Objective(importance.theta, current);
      if (!found || value > best.objective) {
        best.bits = current;
        best.objective = value;
        found = true;
      }
    }
    std::size_t k = free_layers.size();
    while (k > 0) {
      const std::size_t idx = free_layers[k - 1];
      if (current[idx] < bits.max) {
        ++current[idx];
        break;
      }
      current[idx] = bits.min;
      --k;
    }
    if (k == 0) break;
  }

  best.relaxed_bits.assign(best.bits.begin(), best.bits.end());
  best.relaxed_objective = best.objective;
  FillAccounting(best, profiles, budget);
  return best;
}

}  // namespace sepq
