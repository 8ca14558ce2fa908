#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tegrec/error.hpp"
#include "tegrec/predictor.hpp"
#include "tegrec/sim.hpp"
#include "tegrec/trace.hpp"

using namespace tegrec;

namespace {

TemperatureField field_at(double t, std::vector<double> temps, double ambient = 20.0) {
  return TemperatureField{t, std::move(temps), ambient};
}

// Modules follow T_i(t) = a_i + b_i t.
std::vector<TemperatureField> linear_fields(std::size_t n_modules, std::size_t steps) {
  std::vector<TemperatureField> out;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> temps;
    for (std::size_t i = 0; i < n_modules; ++i)
      temps.push_back(60.0 + 3.0 * i + (0.25 - 0.1 * i) * static_cast<double>(t));
    out.push_back(field_at(static_cast<double>(t), temps));
  }
  return out;
}

PredictorConfig config(std::size_t w, std::size_t h, std::size_t hist = 40) {
  PredictorConfig c;
  c.window = w;
  c.horizon = h;
  c.history = hist;
  return c;
}

// Plain Gauss-Jordan solve of a small dense system.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= a[c][c];
  return b;
}

}  // namespace

TEST(Mape, ExactForecastIsZero) {
  const std::vector<double> a{10, 20, 30};
  EXPECT_DOUBLE_EQ(mape(a, a).percent, 0.0);
}

TEST(Mape, TwoSampleHandValue) {
  const auto r = mape(std::vector<double>{100, 200}, std::vector<double>{99, 202});
  EXPECT_NEAR(r.percent, 1.0, 1e-12);
  EXPECT_EQ(r.samples, 2u);
  EXPECT_NEAR(r.worst_percent, 1.0, 1e-12);
}

TEST(Mape, SingleTotalMiss) {
  EXPECT_NEAR(mape(std::vector<double>{50}, std::vector<double>{0}).percent, 100.0, 1e-12);
}

TEST(Mape, Errors) {
  EXPECT_THROW(mape(std::vector<double>{0.0}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(mape(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), DomainError);
  EXPECT_THROW(mape(std::vector<double>{}, std::vector<double>{}), DomainError);
}

TEST(Mape, ScaleInvariant) {
  const std::vector<double> a{12, -40, 7.5}, f{11, -38, 9};
  for (double c : {-3.0, 0.01, 250.0}) {
    std::vector<double> ca, cf;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ca.push_back(c * a[i]);
      cf.push_back(c * f[i]);
    }
    EXPECT_NEAR(mape(ca, cf).percent, mape(a, f).percent, 1e-10);
  }
}

TEST(PredictorConfig, Validation) {
  EXPECT_THROW(config(0, 2).validate(), DomainError);
  EXPECT_THROW(config(3, 0).validate(), DomainError);
  EXPECT_THROW(config(5, 2, 7).validate(), DomainError);
  EXPECT_NO_THROW(config(5, 2, 8).validate());
  EXPECT_EQ(config(5, 2).effective_refit_interval(), 3u);
}

TEST(MlrPredictor, PersistenceBeforeFit) {
  MlrPredictor p(config(5, 3));
  const auto f = field_at(4.0, {50.0, 45.0});
  p.observe(f);
  EXPECT_FALSE(p.fitted());
  const auto out = p.predict(4.0);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(out[k].hot_side_temps, f.hot_side_temps);
    EXPECT_DOUBLE_EQ(out[k].time, 5.0 + k);
  }
}

TEST(MlrPredictor, FirstFitNeedsEnoughRows) {
  MlrPredictor p(config(3, 2));
  EXPECT_EQ(p.min_fields_to_fit(), 8u);
  for (int t = 0; t < 7; ++t) p.observe(field_at(t, {50.0 + t}));
  EXPECT_FALSE(p.fitted());
  p.observe(field_at(7, {57.0}));
  EXPECT_TRUE(p.fitted());
  // A short history caps the requirement.
  EXPECT_EQ(MlrPredictor(config(5, 2, 8)).min_fields_to_fit(), 8u);
}

TEST(MlrPredictor, NoHistoryIsError) {
  MlrPredictor p(config(2, 1));
  EXPECT_THROW(p.predict(0.0), DomainError);
}

TEST(MlrPredictor, SizeMismatchIsError) {
  MlrPredictor p(config(2, 1));
  p.observe(field_at(0, {50, 40}));
  EXPECT_THROW(p.observe(field_at(1, {50, 40, 30})), DomainError);
}

TEST(MlrPredictor, LinearTraceContinuesExactly) {
  for (std::size_t w : {2u, 3u, 5u}) {
    MlrPredictor p(config(w, 2));
    const auto fields = linear_fields(4, 30);
    for (std::size_t t = 0; t < 20; ++t) p.observe(fields[t]);
    p.fit();
    ASSERT_TRUE(p.fitted());
    const auto out = p.predict(19.0);
    for (std::size_t k = 1; k <= 2; ++k)
      for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(out[k - 1].hot_side_temps[i], fields[19 + k].hot_side_temps[i], 1e-6)
            << "w=" << w << " k=" << k << " i=" << i;
  }
}

TEST(MlrPredictor, ConstantTraceStaysConstant) {
  MlrPredictor p(config(3, 2));
  for (int t = 0; t < 15; ++t) p.observe(field_at(t, {55.0, 55.0, 55.0}));
  ASSERT_TRUE(p.fitted());
  for (const auto& f : p.predict(14.0))
    for (double v : f.hot_side_temps) EXPECT_NEAR(v, 55.0, 1e-9);
}

TEST(MlrPredictor, RecoversSecondOrderRecurrence) {
  // T(t) = 4 + 1.2 T(t-1) - 0.3 T(t-2), per module with different starts.
  std::vector<std::vector<double>> series(3);
  const double starts[3][2] = {{60, 58}, {50, 51}, {42, 40}};
  for (std::size_t i = 0; i < 3; ++i) {
    series[i] = {starts[i][0], starts[i][1]};
    for (int t = 2; t < 30; ++t)
      series[i].push_back(4 + 1.2 * series[i][t - 1] - 0.3 * series[i][t - 2]);
  }
  MlrPredictor p(config(2, 2));
  for (int t = 0; t < 25; ++t) p.observe(field_at(t, {series[0][t], series[1][t], series[2][t]}));
  p.fit();
  const auto out = p.predict(24.0);
  for (std::size_t k = 1; k <= 2; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      EXPECT_NEAR(out[k - 1].hot_side_temps[i], series[i][24 + k], 1e-6);
}

TEST(MlrPredictor, CoefficientsMatchNormalEquations) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto cfg = config(2, 1, 30);
  cfg.ridge = 0.0;
  MlrPredictor p(cfg);
  std::vector<double> x{70.0, 50.0};
  std::vector<std::vector<double>> hist;
  for (int t = 0; t < 30; ++t) {
    for (auto& v : x) v += noise(rng);
    hist.push_back(x);
    p.observe(field_at(t, x));
  }
  p.fit();

  // Pooled rows: target T(t+1), features [1, T(t), T(t-1)].
  std::vector<std::vector<double>> ata(3, std::vector<double>(3, 0.0));
  std::vector<double> atb(3, 0.0);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t t = 1; t + 1 < hist.size(); ++t) {
      const double row[3] = {1.0, hist[t][m], hist[t - 1][m]};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) ata[a][b] += row[a] * row[b];
        atb[a] += row[a] * hist[t + 1][m];
      }
    }
  const auto beta = solve_dense(ata, atb);
  ASSERT_EQ(p.coefficients().size(), 1u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(p.coefficients()[0][k], beta[k], 1e-7);
}

TEST(MlrPredictor, CoefficientCountPerHorizon) {
  MlrPredictor pooled(config(4, 3));
  auto unpooled_cfg = config(4, 3);
  unpooled_cfg.pooling = false;
  MlrPredictor unpooled(unpooled_cfg);
  for (const auto& f : linear_fields(5, 20)) {
    pooled.observe(f);
    unpooled.observe(f);
  }
  ASSERT_EQ(pooled.coefficients().size(), 3u);
  for (const auto& b : pooled.coefficients()) EXPECT_EQ(b.size(), 5);
  EXPECT_EQ(unpooled.coefficients().size(), 15u);
}

TEST(MlrPredictor, ForecastClampedToAmbient) {
  MlrPredictor p(config(2, 2));
  for (int t = 0; t < 6; ++t) p.observe(field_at(t, {60.0 - 5.0 * t}, 30.0));
  p.fit();
  ASSERT_TRUE(p.fitted());
  const auto out = p.predict(5.0);
  EXPECT_NEAR(out[0].hot_side_temps[0], 30.0, 1e-6);
  EXPECT_DOUBLE_EQ(out[1].hot_side_temps[0], 30.0);  // linear extrapolation would give 25
}

TEST(MlrPredictor, Deterministic) {
  SynthSpec spec;
  spec.kind = SynthKind::kRandomWalk;
  spec.walk_sigma_C = 0.4;
  spec.duration_s = 80;
  SimulationSettings s;
  s.n_modules = 10;
  const auto fields = trace_fields(synth_trace(spec), s);
  MlrPredictor a(config(5, 2, 60)), b(config(5, 2, 60));
  for (const auto& f : fields) {
    a.observe(f);
    b.observe(f);
  }
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a.coefficients()[k], b.coefficients()[k]);
}

TEST(EvaluateForecasts, RandomWalkMapeFinite) {
  SynthSpec spec;
  spec.kind = SynthKind::kRandomWalk;
  spec.walk_sigma_C = 0.3;
  spec.duration_s = 300;
  SimulationSettings s;
  s.n_modules = 20;
  const auto fields = trace_fields(synth_trace(spec), s);
  const auto reps = evaluate_forecasts(fields, config(5, 2, 60));
  ASSERT_EQ(reps.size(), 2u);
  for (const auto& r : reps) {
    EXPECT_TRUE(std::isfinite(r.percent));
    EXPECT_GE(r.percent, 0.0);
    EXPECT_GT(r.samples, 0u);
  }
  EXPECT_LT(reps[0].percent, 2.0);
}

TEST(EvaluateForecasts, LinearTraceIsExact) {
  const auto reps = evaluate_forecasts(linear_fields(6, 60), config(3, 2));
  for (const auto& r : reps) EXPECT_LT(r.percent, 1e-6);
}

TEST(OraclePredictor, ReturnsTrueFuture) {
  const auto fields = linear_fields(2, 10);
  OraclePredictor o(fields, 3);
  const auto out = o.predict(4.0);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(out[k].hot_side_temps, fields[5 + k].hot_side_temps);
  // Past the end the last field is repeated.
  EXPECT_EQ(o.predict(9.0)[2].hot_side_temps, fields[9].hot_side_temps);
}
