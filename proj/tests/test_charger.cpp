#include <gtest/gtest.h>

#include <sstream>

#include "tegrec/charger.hpp"
#include "tegrec/error.hpp"

using namespace tegrec;

TEST(Efficiency, PeakAtTarget) {
  const ChargerParams p;
  EXPECT_DOUBLE_EQ(efficiency(p, 13.8), p.peak_efficiency);
}

TEST(Efficiency, SymmetricAboutTarget) {
  const ChargerParams p;
  for (double d : {0.5, 2.0, 7.3, 13.0})
    EXPECT_NEAR(efficiency(p, 13.8 + d), efficiency(p, 13.8 - d), 1e-12);
}

TEST(Efficiency, FiveVoltsBelowTarget) {
  ChargerParams p;
  p.peak_efficiency = 0.95;
  p.droop = 0.02;
  p.floor_efficiency = 0.5;
  EXPECT_NEAR(efficiency(p, 8.8), 0.95 - 0.02 * 5.0, 1e-12);
  EXPECT_NEAR(efficiency(p, 8.8), 0.85, 1e-12);
}

TEST(Efficiency, FloorHolds) {
  ChargerParams p;
  p.droop = 0.1;
  EXPECT_DOUBLE_EQ(efficiency(p, 39.0), p.floor_efficiency);
}

TEST(Efficiency, TableOverridesCurve) {
  ChargerParams p;
  p.table = EfficiencyTable({{5.0, 0.6}, {15.0, 0.9}, {30.0, 0.8}});
  EXPECT_NEAR(efficiency(p, 10.0), 0.75, 1e-12);
  EXPECT_NEAR(efficiency(p, 2.0), 0.6, 1e-12);
  EXPECT_NEAR(efficiency(p, 40.0), 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(p.best_efficiency(), 0.9);
}

TEST(EfficiencyTable, LoadsCsv) {
  std::istringstream in("v_in,efficiency\n5,0.7\n10,0.9\n");
  const auto t = load_efficiency_table(in);
  EXPECT_NEAR(t(7.5), 0.8, 1e-12);
}

TEST(EfficiencyTable, RejectsBadInput) {
  std::istringstream bad_header("volts,eff\n5,0.7\n10,0.9\n");
  EXPECT_THROW(load_efficiency_table(bad_header), ParseError);
  std::istringstream bad_value("v_in,efficiency\n5,1.7\n10,0.9\n");
  EXPECT_ANY_THROW(load_efficiency_table(bad_value));
  EXPECT_THROW(EfficiencyTable({{5.0, 0.7}}), DomainError);
  EXPECT_THROW(EfficiencyTable({{5.0, 0.7}, {5.0, 0.8}}), DomainError);
}

TEST(BatteryPower, Examples) {
  ChargerParams p;
  EXPECT_DOUBLE_EQ(battery_power(p, 13.8, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(battery_power(p, p.v_min - 0.5, 40.0), 0.0);
  EXPECT_DOUBLE_EQ(battery_power(p, p.v_max + 0.5, 40.0), 0.0);
  // 8.8 V gives 0.85 efficiency with default parameters.
  EXPECT_NEAR(battery_power(p, 8.8, 40.0), 34.0, 1e-12);
  EXPECT_THROW(battery_power(p, -1.0, 40.0), DomainError);
}

TEST(BatteryPower, FromOperatingPoint) {
  ArrayOperatingPoint op;
  op.total_voltage = 13.8;
  op.total_power = 10.0;
  EXPECT_NEAR(battery_power(ChargerParams{}, op), 9.5, 1e-12);
}

TEST(DeriveNRange, IntegerBand) {
  ChargerParams p;
  p.v_min = 10;
  p.v_max = 20;
  p.target_voltage = 15;
  const auto r = derive_n_range(p, 2.0);
  EXPECT_EQ(r.n_min, 5u);
  EXPECT_EQ(r.n_max, 10u);
}

TEST(DeriveNRange, SingleGroupAtTarget) {
  ChargerParams p;
  p.v_min = 12;
  p.v_max = 16;
  const auto r = derive_n_range(p, 13.8);
  EXPECT_EQ(r.n_min, 1u);
  EXPECT_EQ(r.n_max, 1u);
}

TEST(DeriveNRange, NoFitIsConfigError) {
  ChargerParams p;
  p.v_min = 10;
  p.v_max = 20;
  p.target_voltage = 15;
  try {
    derive_n_range(p, 25.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "charger");
  }
  EXPECT_THROW(derive_n_range(p, 0.0), DomainError);
}

TEST(ChargerParams, Validation) {
  ChargerParams p;
  p.floor_efficiency = 0.99;
  EXPECT_THROW(p.validate(), DomainError);
  p = {};
  p.v_min = 20;
  EXPECT_THROW(p.validate(), DomainError);
}
