#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "tegrec/error.hpp"
#include "tegrec/predictor.hpp"
#include "tegrec/reconfig.hpp"
#include "tegrec/validation.hpp"

using namespace tegrec;

namespace {

ReconfigParams band(std::size_t lo, std::size_t hi, Objective obj = Objective::kArraySide) {
  ReconfigParams p;
  p.n_min = lo;
  p.n_max = hi;
  p.objective = obj;
  return p;
}

// Array MPP from first principles: with group sums S_j and sizes m_j,
// P(I) = I * sum_j (S_j - I r) / m_j, maximised at I* = A / 2B.
double mpp_power(const std::vector<std::size_t>& starts, const std::vector<double>& e, double r) {
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < starts.size(); ++j) {
    const std::size_t lo = starts[j] - 1;
    const std::size_t hi = j + 1 < starts.size() ? starts[j + 1] - 1 : e.size();
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += e[i];
    a += s / static_cast<double>(hi - lo);
    b += r / static_cast<double>(hi - lo);
  }
  return a * a / (4.0 * b);
}

// Exhaustive search by bitmask over the N-1 gaps.
double best_by_bitmask(const std::vector<double>& e, double r, std::size_t n_lo, std::size_t n_hi) {
  const std::size_t n = e.size();
  double best = -1.0;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<std::size_t> starts{1};
    for (std::size_t g = 0; g + 1 < n; ++g)
      if (mask & (1u << g)) starts.push_back(g + 2);
    if (starts.size() < n_lo || starts.size() > n_hi) continue;
    best = std::max(best, mpp_power(starts, e, r));
  }
  return best;
}

}  // namespace

TEST(BalanceGroups, UniformSplitsEvenly) {
  const std::vector<double> i{1, 1, 1, 1};
  EXPECT_EQ(balance_groups(i, 2).boundaries(), (std::vector<std::size_t>{1, 3}));
}

TEST(BalanceGroups, SpikeAtStart) {
  // I_ideal = 3; {3} and {1,1,1} both hit it exactly.
  const std::vector<double> i{3, 1, 1, 1};
  EXPECT_EQ(balance_groups(i, 2).boundaries(), (std::vector<std::size_t>{1, 2}));
}

TEST(BalanceGroups, TieBreakDirection) {
  // Cutting after module 1 or 2 leaves the same deviation |1-2| = |3-2|.
  const std::vector<double> i{1, 2, 1};
  EXPECT_EQ(balance_groups(i, 2, TieBreak::kSmallerBoundary).boundaries(),
            (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(balance_groups(i, 2, TieBreak::kLargerBoundary).boundaries(),
            (std::vector<std::size_t>{1, 3}));
}

TEST(BalanceGroups, FeasibleUnderAdversarialSpikes) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n_mod = 2 + rng() % 40;
    std::vector<double> cur(n_mod, 0.01);
    cur[rng() % n_mod] = 1000.0;  // one huge module
    const std::size_t n = 1 + rng() % n_mod;
    const auto c = balance_groups(cur, n);
    EXPECT_EQ(c.n_groups(), n);
    for (std::size_t j = 0; j < n; ++j) EXPECT_GE(c.group_size(j), 1u);
  }
  EXPECT_THROW(balance_groups(std::vector<double>{1, 1}, 3), DomainError);
}

TEST(Inor, AlwaysValidConfiguration) {
  std::mt19937_64 rng(13);
  const TegParams teg;
  const ChargerParams ch;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 8 + rng() % 60;
    const auto f = random_radiator_field(n, rng);
    const auto c = inor(f, teg, ch, band(2, std::min<std::size_t>(n, 8), Objective::kBatterySide));
    EXPECT_EQ(c.n_modules(), n);
    EXPECT_GE(c.n_groups(), 2u);
    EXPECT_LE(c.n_groups(), 8u);
  }
}

TEST(Inor, UniformFieldMatchesOracleAndSumOfMpps) {
  const TegParams teg;
  const ChargerParams ch;
  const auto f = uniform_field(12, 80.0, 30.0);
  const auto emfs = module_emfs(f, teg);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += module_mpp(teg, f.delta_t(i)).power;
  const auto p = band(2, 4);
  const auto ri = inor_detailed(emfs, teg, ch, p);
  const auto rb = brute_force_best_detailed(emfs, teg, ch, p);
  EXPECT_NEAR(ri.score, sum, 1e-9 * sum);
  EXPECT_NEAR(rb.score, sum, 1e-9 * sum);
  // Oracle tie-break: fewest groups, smallest boundaries.
  EXPECT_EQ(rb.config.boundaries(), (std::vector<std::size_t>{1, 7}));
}

TEST(Inor, RejectsBandWiderThanArray) {
  EXPECT_THROW(inor(uniform_field(4, 60, 30), TegParams{}, ChargerParams{}, band(2, 6)), DomainError);
}

TEST(BruteForce, ThreeModuleHandEnumeration) {
  // E = 2 V each, r = 1: one group gives 3 W, either two-group split 8/3 W.
  TegParams teg;
  teg.internal_resistance = 1.0;
  const std::vector<double> e{2, 2, 2};
  const auto all = brute_force_best_detailed(e, teg, ChargerParams{}, band(1, 2));
  EXPECT_NEAR(all.score, 3.0, 1e-12);
  EXPECT_EQ(all.config.n_groups(), 1u);
  const auto two = brute_force_best_detailed(e, teg, ChargerParams{}, band(2, 2));
  EXPECT_NEAR(two.score, 8.0 / 3, 1e-12);
  EXPECT_EQ(two.config.boundaries(), (std::vector<std::size_t>{1, 2}));
}

TEST(BruteForce, SingleModule) {
  const auto r = brute_force_best_detailed(std::vector<double>{1.5}, TegParams{}, ChargerParams{}, band(1, 1));
  EXPECT_EQ(r.config.n_groups(), 1u);
}

TEST(BruteForce, MatchesBitmaskEnumeration) {
  std::mt19937_64 rng(14);
  const TegParams teg;
  for (int k = 0; k < 80; ++k) {
    const std::size_t n = 2 + rng() % 9;
    const auto f = random_radiator_field(n, rng);
    const auto e = module_emfs(f, teg);
    const std::size_t lo = 1 + rng() % n;
    const std::size_t hi = lo + rng() % (n - lo + 1);
    const double expect = best_by_bitmask(e, teg.internal_resistance, lo, hi);
    const auto got = brute_force_best_detailed(e, teg, ChargerParams{}, band(lo, hi));
    EXPECT_NEAR(got.score, expect, 1e-9 * std::max(1.0, expect));
    EXPECT_NEAR(mpp_power(got.config.boundaries(), e, teg.internal_resistance), got.score,
                1e-9 * std::max(1.0, expect));
  }
}

TEST(BruteForce, NeverBelowInor) {
  std::mt19937_64 rng(15);
  const TegParams teg;
  const ChargerParams ch;
  for (auto obj : {Objective::kArraySide, Objective::kBatterySide})
    for (int k = 0; k < 100; ++k) {
      const auto f = random_radiator_field(12, rng);
      const auto e = module_emfs(f, teg);
      const auto p = band(2, 4, obj);
      EXPECT_GE(brute_force_best_detailed(e, teg, ch, p).score + 1e-12,
                inor_detailed(e, teg, ch, p).score);
    }
}

TEST(BruteForce, RefusesLargeArrays) {
  const std::vector<double> e(kBruteForceMaxModules + 1, 1.0);
  EXPECT_THROW(brute_force_best_detailed(e, TegParams{}, ChargerParams{}, band(2, 4)), DomainError);
}

TEST(ShouldSwitch, GateArithmetic) {
  EXPECT_FALSE(should_switch(100.0, 103.0, 5.0));  // 100 <= 98 fails
  EXPECT_TRUE(should_switch(100.0, 103.0, 3.0));   // tie goes to switching
  EXPECT_TRUE(should_switch(100.0, 103.0, 0.0));
}

namespace {

struct DecisionFixture {
  std::vector<TemperatureField> fields;
  ControllerModel model;

  explicit DecisionFixture(std::uint64_t seed, std::size_t n = 12) {
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 3; ++t) {
      auto f = random_radiator_field(n, rng);
      f.time = t;
      fields.push_back(std::move(f));
    }
    model.reconfig = band(2, 4);
  }
};

}  // namespace

TEST(DecideSwitch, BootstrapAdoptsCandidate) {
  DecisionFixture fx(1);
  const OraclePredictor oracle(fx.fields, 2);
  const auto cand = Configuration(12, {1, 5, 9});
  const auto d = decide_switch(0.0, fx.fields[0], cand, std::nullopt, oracle, fx.model);
  EXPECT_TRUE(d.switched);
  EXPECT_EQ(d.chosen, cand);
  EXPECT_EQ(d.flips, bootstrap_flip_count(12));
}

TEST(DecideSwitch, IdenticalCandidateIsNoSwitch) {
  DecisionFixture fx(2);
  const OraclePredictor oracle(fx.fields, 2);
  const auto c = Configuration(12, {1, 4, 8});
  const auto d = decide_switch(0.0, fx.fields[0], c, c, oracle, fx.model);
  EXPECT_FALSE(d.switched);
  EXPECT_EQ(d.flips, 0u);
  EXPECT_DOUBLE_EQ(d.e_old, d.e_new);
  EXPECT_EQ(d.chosen, c);
}

TEST(DecideSwitch, EnergiesCoverCurrentPlusForecast) {
  DecisionFixture fx(3);
  const OraclePredictor oracle(fx.fields, 2);
  const auto c = Configuration(12, {1, 7});
  const auto d = decide_switch(0.0, fx.fields[0], c, Configuration(12, {1, 3}), oracle, fx.model);
  double expect = 0.0;
  for (const auto& f : fx.fields)
    expect += mpp_power(c.boundaries(), module_emfs(f, fx.model.teg), fx.model.teg.internal_resistance);
  EXPECT_NEAR(d.e_new, expect, 1e-9 * expect);
}

TEST(DecideSwitch, ZeroOverheadPicksMaxEnergy) {
  for (std::uint64_t seed = 10; seed < 60; ++seed) {
    DecisionFixture fx(seed);
    fx.model.overhead = OverheadParams{0, 0, 0, 0, 0, false};
    const OraclePredictor oracle(fx.fields, 2);
    std::mt19937_64 rng(seed);
    const auto old = inor(fx.fields[0], fx.model.teg, fx.model.charger, band(2, 2));
    const auto d = dnor_step(0.0, fx.fields[0], old, oracle, fx.model);
    const double chosen = predicted_energy(
        d.chosen, std::vector<TemperatureField>(fx.fields.begin(), fx.fields.end()), fx.model);
    EXPECT_NEAR(chosen, std::max(d.e_old, d.e_new), 1e-12 * std::max(1.0, chosen));
  }
}

TEST(DecideSwitch, LargeOverheadBlocksSwitch) {
  DecisionFixture fx(4);
  fx.model.overhead.per_switch_energy = 1e6;
  const OraclePredictor oracle(fx.fields, 2);
  const auto d = decide_switch(0.0, fx.fields[0], Configuration(12, {1, 7}),
                               Configuration(12, {1, 2, 3}), oracle, fx.model);
  EXPECT_FALSE(d.switched);
  EXPECT_EQ(d.chosen, Configuration(12, {1, 2, 3}));
  EXPECT_GT(d.e_overhead, 1e6);
}

TEST(DecideSwitch, OverheadPricedFromOldConfigurationPower) {
  DecisionFixture fx(5);
  const OraclePredictor oracle(fx.fields, 2);
  const Configuration old(12, {1, 2, 3});
  const Configuration cand(12, {1, 7});
  const auto d = decide_switch(0.0, fx.fields[0], cand, old, oracle, fx.model);
  const double p_old =
      mpp_power(old.boundaries(), module_emfs(fx.fields[0], fx.model.teg), fx.model.teg.internal_resistance);
  const auto& o = fx.model.overhead;
  const double delays = o.sensing_delay + o.compute_delay + o.reconfig_delay + o.mppt_settle_delay;
  EXPECT_NEAR(d.e_overhead, delays * p_old + o.per_switch_energy * d.flips, 1e-12);
  EXPECT_EQ(d.flips, switch_flip_count(old, cand));
}
