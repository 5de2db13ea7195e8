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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sepq/errors.h"

namespace sepq {
namespace {

std::vector<LayerProfile> Profiles(std::vector<std::int64_t> params,
                                   std::vector<std::int64_t> macs = {}) {
  std::vector<LayerProfile> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.push_back({"l" + std::to_string(i), params[i], macs.empty() ? params[i] : macs[i], {}});
  }
  return out;
}

ImportanceVector Theta(std::vector<double> theta) {
  ImportanceVector v;
  v.theta = theta;
  v.alpha.assign(theta.size(), 0.0);
  return v;
}

TEST(ImportanceTest, ExponentialOfScaledAlpha) {
  const std::vector<double> alpha = {0.5, 1.0};
  const auto zero = Importance(alpha, 0.0);
  EXPECT_EQ(zero.theta, (std::vector<double>{1.0, 1.0}));
  const auto two = Importance(alpha, 2.0);
  EXPECT_NEAR(two.theta[0], 2.718282, 1e-6);
  EXPECT_NEAR(two.theta[1], 7.389056, 1e-6);
  EXPECT_EQ(two.alpha, alpha);
  EXPECT_EQ(two.beta, 2.0);
}

TEST(ImportanceTest, MonotoneInAlpha) {
  const std::vector<double> alpha = {-0.3, 0.0, 0.01, 0.2, 3.0};
  const auto v = Importance(alpha, 1.7);
  for (std::size_t i = 1; i < v.theta.size(); ++i) EXPECT_GT(v.theta[i], v.theta[i - 1]);
}

TEST(ImportanceTest, OverflowAsksForSmallerBeta) {
  const std::vector<double> alpha = {1.0};
  try {
    Importance(alpha, 1e6);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("smaller --beta"), std::string::npos);
  }
  const std::vector<double> bad = {NAN};
  EXPECT_THROW(Importance(bad, 1.0), InvalidArgument);
}

TEST(ImportanceTest, ReparameterizationGivesIdenticalAllocation) {
  const std::vector<double> alpha = {0.02, 0.05, 0.04, 0.01};
  std::vector<double> scaled;
  for (double a : alpha) scaled.push_back(a * 4.0);
  const auto a = Importance(alpha, 8.0);
  const auto b = Importance(scaled, 2.0);
  EXPECT_EQ(a.theta, b.theta);
  const auto profiles = Profiles({100, 300, 200, 400});
  const auto budget = Budget::Bytes(600);
  EXPECT_EQ(SolveLp(a, profiles, budget, {2, 8}).bits, SolveLp(b, profiles, budget, {2, 8}).bits);
}

TEST(AccountingTest, ModelSize) {
  const auto p = Profiles({1000});
  EXPECT_EQ(ModelSizeBytes(std::vector<int>{4}, p), 500.0);
  const auto q = Profiles({123, 4567, 89});
  EXPECT_EQ(ModelSizeBytes(std::vector<int>{6, 8, 2}, q),
            2.0 * ModelSizeBytes(std::vector<int>{3, 4, 1}, q));
  EXPECT_THROW(ModelSizeBytes(std::vector<int>{4, 4}, p), InvalidArgument);
}

TEST(AccountingTest, Bops) {
  const auto p = Profiles({10, 10}, {1000, 50});
  EXPECT_EQ(Bops(std::vector<int>{4, 8}, p, 8), (4000.0 + 400.0) * 8);
  EXPECT_EQ(Bops(std::vector<int>{4, 8}, p, 0), 0.0);
  EXPECT_EQ(Bops(std::vector<int>{8, 16}, p, 6), 2.0 * Bops(std::vector<int>{4, 8}, p, 6));
}

TEST(AccountingTest, ResNet18TableArithmetic) {
  // Parameters such that the float32 model is 44.6 MB; MACs such that the
  // float32 x float32 BOPs are 1858 G.
  const auto params = static_cast<std::int64_t>(std::llround(44.6 * kBytesPerMegabyte / 4.0));
  const auto macs = static_cast<std::int64_t>(std::llround(1858e9 / 1024.0));
  const auto p = Profiles({params}, {macs});
  const std::vector<int> w8 = {8};
  EXPECT_NEAR(ModelSizeBytes(w8, p) / kBytesPerMegabyte, 11.1, 0.01 * 11.1);
  EXPECT_NEAR(Bops(w8, p, 8) / 1e9, 116.0, 0.01 * 116.0);
}

TEST(SolveLpTest, TwoLayerExample) {
  const auto p = Profiles({1000, 1000});
  const auto c = SolveLp(Theta({1, 2}), p, Budget::Bytes(1500), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{4, 8}));
  EXPECT_EQ(c.objective, 20.0);
  EXPECT_EQ(c.relaxed_objective, 20.0);
  EXPECT_EQ(c.size_bytes, 1500.0);
  EXPECT_TRUE(c.feasible);

  const auto brute = BruteForceAllocation(Theta({1, 2}), p, Budget::Bytes(1500), {4, 8});
  EXPECT_EQ(brute.bits, c.bits);
  EXPECT_EQ(brute.objective, 20.0);
}

TEST(SolveLpTest, SlackBudgetGivesMaxBits) {
  const auto p = Profiles({10, 20, 30});
  const auto c = SolveLp(Theta({1, 1, 1}), p, Budget::Bytes(60 * 8 / 8.0 + 1), {2, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{8, 8, 8}));
}

TEST(SolveLpTest, InfeasibleBudgetThrows) {
  const auto p = Profiles({1000, 1000});
  try {
    SolveLp(Theta({1, 1}), p, Budget::Bytes(999), {4, 8});
    FAIL();
  } catch (const InfeasibleBudget& e) {
    EXPECT_EQ(e.minimum_cost(), 1000.0);
  }
  EXPECT_THROW(BruteForceAllocation(Theta({1, 1}), p, Budget::Bytes(999), {4, 8}),
               InfeasibleBudget);
}

TEST(SolveLpTest, PinnedLayersCountButStayFixed) {
  auto p = Profiles({100, 1000, 100});
  p.front().pinned_bits = 8;
  p.back().pinned_bits = 8;
  // Pins cost 200 bytes; layer 1 gets 4 + 400 / 125 = 7.2 bits.
  const auto c = SolveLp(Theta({5, 1, 5}), p, Budget::Bytes(200 + 500 + 400), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{8, 7, 8}));
  EXPECT_DOUBLE_EQ(c.relaxed_bits[1], 7.2);
  EXPECT_DOUBLE_EQ(c.relaxed_objective, 80.0 + 7.2);
  EXPECT_EQ(c.objective, 87.0);
}

TEST(SolveLpTest, PinsAboveSearchRange) {
  auto p = Profiles({100, 100});
  p[0].pinned_bits = 8;
  const auto c = SolveLp(Theta({1, 1}), p, Budget::Bytes(150), {2, 4});
  EXPECT_EQ(c.bits, (std::vector<int>{8, 4}));
}

TEST(SolveLpTest, TiesGoToLowerIndex) {
  const auto p = Profiles({100, 100, 100});
  // Room for 2 extra bits across three identical layers.
  const auto c = SolveLp(Theta({1, 1, 1}), p, Budget::Bytes(3 * 50 + 25), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{6, 4, 4}));
}

TEST(SolveLpTest, BopsBudgetUsesMacsAndActivationBits) {
  const auto p = Profiles({1, 1}, {100, 10});
  // Layer 1 is ten times cheaper per bit; it reaches b_max first.
  const auto c = SolveLp(Theta({1, 1}), p, Budget::Bops((4 * 100 + 8 * 10) * 4.0 + 400, 4), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{5, 8}));
  EXPECT_EQ(c.bops, (5 * 100 + 8 * 10) * 4.0);
}

TEST(SolveLpTest, ZeroCostLayerRaisedForFree) {
  const auto p = Profiles({100, 100}, {0, 10});
  const auto c = SolveLp(Theta({1, 1}), p, Budget::Bops(4 * 10 * 8, 8), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{8, 4}));
}

TEST(SolveLpTest, RejectsMalformedInput) {
  const auto p = Profiles({100});
  EXPECT_THROW(SolveLp(Theta({1, 1}), p, Budget::Bytes(100), {4, 8}), InvalidArgument);
  EXPECT_THROW(SolveLp(Theta({1}), p, Budget::Bytes(100), {8, 4}), InvalidArgument);
  EXPECT_THROW(SolveLp(Theta({1}), p, Budget::Bytes(0), {4, 8}), InvalidArgument);
  EXPECT_THROW(SolveLp(Theta({0}), p, Budget::Bytes(100), {4, 8}), InvalidArgument);
}

TEST(BruteForceTest, SingleFreeLayer) {
  const auto p = Profiles({1000});
  const auto c = BruteForceAllocation(Theta({1}), p, Budget::Bytes(750), {2, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{6}));
}

TEST(BruteForceTest, AllPinned) {
  auto p = Profiles({10, 10});
  p[0].pinned_bits = 8;
  p[1].pinned_bits = 8;
  const auto c = BruteForceAllocation(Theta({1, 1}), p, Budget::Bytes(20), {2, 4});
  EXPECT_EQ(c.bits, (std::vector<int>{8, 8}));
  EXPECT_TRUE(c.feasible);
}

TEST(BruteForceTest, LexicographicTieBreak) {
  const auto p = Profiles({8, 8});
  // Both [4,5] and [5,4] are optimal.
  const auto c = BruteForceAllocation(Theta({1, 1}), p, Budget::Bytes(9), {4, 8});
  EXPECT_EQ(c.bits, (std::vector<int>{4, 5}));
}

TEST(BruteForceTest, RefusesTooManyLayers) {
  const auto p = Profiles(std::vector<std::int64_t>(9, 10));
  EXPECT_THROW(BruteForceAllocation(Theta(std::vector<double>(9, 1.0)), p, Budget::Bytes(1000), {2, 8}),
               InvalidArgument);
}

struct Instance {
  ImportanceVector theta;
  std::vector<LayerProfile> profiles;
  Budget budget;
  BitRange bits;
};

Instance RandomInstance(std::mt19937_64& rng) {
  Instance in;
  const std::size_t free_layers = 1 + rng() % 6;
  const std::size_t pinned = rng() % 3;
  std::uniform_int_distribution<std::int64_t> params(1, 5000), macs(0, 100000);
  std::uniform_real_distribution<double> theta(0.5, 3.0);
  for (std::size_t i = 0; i < free_layers + pinned; ++i) {
    LayerProfile p{"l" + std::to_string(i), params(rng), macs(rng), {}};
    if (i < pinned) p.pinned_bits = 8;
    in.profiles.push_back(p);
    in.theta.theta.push_back(theta(rng));
  }
  in.theta.alpha.assign(in.theta.theta.size(), 0.0);
  const int lo = 2 + static_cast<int>(rng() % 7);
  in.bits = {lo, lo + static_cast<int>(rng() % (9 - lo))};
  const bool bops = rng() % 2;
  const int act = 2 + static_cast<int>(rng() % 7);
  Budget tmp = bops ? Budget::Bops(1, act) : Budget::Bytes(1);
  std::vector<int> lo_bits, hi_bits;
  for (const auto& p : in.profiles) {
    lo_bits.push_back(p.pinned_bits.value_or(in.bits.min));
    hi_bits.push_back(p.pinned_bits.value_or(in.bits.max));
  }
  const double min_cost = BudgetCost(lo_bits, in.profiles, tmp);
  const double max_cost = BudgetCost(hi_bits, in.profiles, tmp);
  std::uniform_real_distribution<double> frac(0.0, 1.1);
  tmp.limit = std::max(min_cost + frac(rng) * (max_cost - min_cost), 1.0);
  in.budget = tmp;
  return in;
}

TEST(SolveLpPropertyTest, OracleSandwichAndFeasibility) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = RandomInstance(rng);
    const auto lp = SolveLp(in.theta, in.profiles, in.budget, in.bits);
    const auto brute = BruteForceAllocation(in.theta, in.profiles, in.budget, in.bits);
    const double max_theta = *std::max_element(in.theta.theta.begin(), in.theta.theta.end());
    const double tol = 1e-9 * lp.relaxed_objective;
    EXPECT_GE(lp.relaxed_objective + tol, brute.objective);
    EXPECT_GE(brute.objective + tol, lp.objective);
    EXPECT_LE(lp.relaxed_objective - lp.objective, max_theta + tol);
    EXPECT_TRUE(lp.feasible);
    EXPECT_LE(BudgetCost(lp.bits, in.profiles, in.budget), in.budget.limit);
    EXPECT_EQ(lp.size_bytes, ModelSizeBytes(lp.bits, in.profiles));
    for (std::size_t i = 0; i < lp.bits.size(); ++i) {
      if (in.profiles[i].pinned_bits) {
        EXPECT_EQ(lp.bits[i], *in.profiles[i].pinned_bits);
      } else {
        EXPECT_GE(lp.bits[i], in.bits.min);
        EXPECT_LE(lp.bits[i], in.bits.max);
      }
    }
  }
}

TEST(SolveLpPropertyTest, DominatesUniformConfigurations) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = RandomInstance(rng);
    const auto lp = SolveLp(in.theta, in.profiles, in.budget, in.bits);
    for (int b = in.bits.min; b <= in.bits.max; ++b) {
      std::vector<int> uniform;
      for (const auto& p : in.profiles) uniform.push_back(p.pinned_bits.value_or(b));
      if (BudgetCost(uniform, in.profiles, in.budget) > in.budget.limit) continue;
      double value = 0.0;
      for (std::size_t i = 0; i < uniform.size(); ++i) value += in.theta.theta[i] * uniform[i];
      EXPECT_GE(lp.relaxed_objective * (1 + 1e-12), value);
    }
  }
}

TEST(SolveLpPropertyTest, DenserLayersGetAtLeastAsManyBits) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = RandomInstance(rng);
    const auto lp = SolveLp(in.theta, in.profiles, in.budget, in.bits);
    for (std::size_t a = 0; a < in.profiles.size(); ++a) {
      for (std::size_t b = 0; b < in.profiles.size(); ++b) {
        if (in.profiles[a].pinned_bits || in.profiles[b].pinned_bits) continue;
        const double ca = CostPerBit(in.profiles[a], in.budget);
        const double cb = CostPerBit(in.profiles[b], in.budget);
        if (in.theta.theta[a] * cb > in.theta.theta[b] * ca) {
          EXPECT_GE(lp.relaxed_bits[a], lp.relaxed_bits[b]);
        }
      }
    }
  }
}

TEST(SolveLpPropertyTest, Deterministic) {
  std::mt19937_64 rng(8);
  const auto in = RandomInstance(rng);
  const auto a = SolveLp(in.theta, in.profiles, in.budget, in.bits);
  const auto b = SolveLp(in.theta, in.profiles, in.budget, in.bits);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_EQ(a.relaxed_bits, b.relaxed_bits);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.relaxed_objective, b.relaxed_objective);
}

}  // namespace
}  // namespace sepq
