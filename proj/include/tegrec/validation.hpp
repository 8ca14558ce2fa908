#pragma once

// Oracle comparisons and runtime scaling for the reconfiguration heuristics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tegrec/charger.hpp"
#include "tegrec/error.hpp"
#include "tegrec/reconfig.hpp"
#include "tegrec/teg.hpp"
#include "tegrec/thermal.hpp"

namespace tegrec {

/// Random field obeying the radiator ordering: hot-side temperatures drawn
/// uniformly from [ambient, ambient + max_delta] and sorted non-increasing.
template <class Rng>
TemperatureField random_radiator_field(std::size_t n_modules, Rng& rng, double ambient = 30.0,
                                       double max_delta = 70.0) {
  std::uniform_real_distribution<double> u(0.0, max_delta);
  TemperatureField f;
  f.ambient_temp = ambient;
  f.hot_side_temps.resize(n_modules);
  for (auto& t : f.hot_side_temps) t = ambient + u(rng);
  std::sort(f.hot_side_temps.begin(), f.hot_side_temps.end(), std::greater<>());
  return f;
}

template <class T>
T percentile(std::vector<T> v, double q) {
  if (v.empty()) throw DomainError("percentile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

struct GapStudy {
  std::vector<double> gaps;  // 1 - P_inor / P_oracle per instance
  double mean = 0.0;
  double median = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  double min_ratio = 1.0;    // worst P_inor / P_oracle
  std::size_t exact = 0;     // instances where INOR matched the oracle
};

/// INOR against the exhaustive oracle on seeded random radiator fields.
inline GapStudy run_gap_study(std::size_t n_modules, const ReconfigParams& params,
                              std::size_t instances, std::uint64_t seed, const TegParams& teg,
                              const ChargerParams& charger) {
  if (instances == 0) throw DomainError("gap study: need at least one instance");
  std::mt19937_64 rng(seed);
  GapStudy s;
  s.gaps.reserve(instances);
  for (std::size_t k = 0; k < instances; ++k) {
    const auto field = random_radiator_field(n_modules, rng);
    const auto emfs = module_emfs(field, teg);
    const double p_inor = inor_detailed(emfs, teg, charger, params).score;
    const double p_best = brute_force_best_detailed(emfs, teg, charger, params).score;
    const double ratio = p_best > 0.0 ? p_inor / p_best : 1.0;
    s.gaps.push_back(1.0 - ratio);
    s.min_ratio = std::min(s.min_ratio, ratio);
    if (ratio >= 1.0 - 1e-12) ++s.exact;
  }
  s.mean = std::accumulate(s.gaps.begin(), s.gaps.end(), 0.0) / static_cast<double>(instances);
  s.median = percentile(s.gaps, 0.5);
  s.p99 = percentile(s.gaps, 0.99);
  s.max = *std::max_element(s.gaps.begin(), s.gaps.end());
  return s;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

enum class TimedAlgorithm { kInor, kBruteForce };

inline std::string_view to_string(TimedAlgorithm a) {
  return a == TimedAlgorithm::kInor ? "inor" : "brute-force";
}

struct ScalingRow {
  std::size_t n_modules = 0;
  double median_ms = 0.0;
  std::size_t calls = 0;
};

struct ScalingReport {
  TimedAlgorithm algorithm = TimedAlgorithm::kInor;
  std::vector<ScalingRow> rows;
  LinearFit fit;              // median_ms against N
  double doubling_ratio = 0;  // 2^(log-log slope between first and last size)
};

/// Median wall time per call for each array size. Fields are regenerated
/// per call from a seeded generator; calls run serially.
inline ScalingReport measure_runtime(TimedAlgorithm algorithm, std::vector<std::size_t> sizes,
                                     const TegParams& teg, const ChargerParams& charger,
                                     const ReconfigParams& params, std::size_t calls = 100,
                                     std::uint64_t seed = 1) {
  if (sizes.size() < 2) throw DomainError("measure_runtime: need at least two sizes");
  if (calls < 1) throw DomainError("measure_runtime: need at least one call");
  std::mt19937_64 rng(seed);
  ScalingReport rep;
  rep.algorithm = algorithm;
  volatile double sink = 0.0;

  for (std::size_t n : sizes) {
    ReconfigParams p = params;
    p.n_max = std::min(p.n_max, n);
    p.n_min = std::min(p.n_min, p.n_max);
    std::vector<std::vector<double>> inputs;
    inputs.reserve(calls);
    for (std::size_t c = 0; c < calls; ++c)
      inputs.push_back(module_emfs(random_radiator_field(n, rng), teg));

    // Warm-up call to fault in code and allocator state.
    sink = sink + (algorithm == TimedAlgorithm::kInor
                       ? inor_detailed(inputs[0], teg, charger, p).score
                       : brute_force_best_detailed(inputs[0], teg, charger, p).score);

    std::vector<double> times;
    times.reserve(calls);
    for (const auto& emfs : inputs) {
      const auto t0 = std::chrono::steady_clock::now();
      const double s = algorithm == TimedAlgorithm::kInor
                           ? inor_detailed(emfs, teg, charger, p).score
                           : brute_force_best_detailed(emfs, teg, charger, p).score;
      const auto t1 = std::chrono::steady_clock::now();
      sink = sink + s;
      times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    rep.rows.push_back({n, percentile(times, 0.5), calls});
  }

  std::vector<double> xs, ys;
  for (const auto& r : rep.rows) {
    xs.push_back(static_cast<double>(r.n_modules));
    ys.push_back(r.median_ms);
  }
  rep.fit = fit_line(xs, ys);
  const auto& first = rep.rows.front();
  const auto& last = rep.rows.back();
  const double size_ratio = static_cast<double>(last.n_modules) / first.n_modules;
  if (size_ratio > 1.0 && first.median_ms > 0.0 && last.median_ms > 0.0) {
    const double exponent = std::log(last.median_ms / first.median_ms) / std::log(size_ratio);
    rep.doubling_ratio = std::pow(2.0, exponent);
  }
  return rep;
}

}  // namespace tegrec
