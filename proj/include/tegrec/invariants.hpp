#pragma once

// Randomised invariant checks run on demand (CLI `validate`) and by the
// acceptance suite. Each check draws `cases` seeded instances and counts
// violations; the first violation is described in `detail`.

#include <algorithm>
#include <functional>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tegrec/array.hpp"
#include "tegrec/predictor.hpp"
#include "tegrec/reconfig.hpp"
#include "tegrec/sim.hpp"
#include "tegrec/thermal.hpp"
#include "tegrec/trace.hpp"

namespace tegrec {

struct InvariantResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string detail;

  bool passed() const noexcept { return cases > 0 && failures == 0; }

  void fail(const std::string& what) {
    if (failures++ == 0) detail = what;
  }
};

namespace detail {

template <class Rng>
Configuration random_configuration(std::size_t n_modules, Rng& rng) {
  std::bernoulli_distribution cut(0.4);
  std::vector<std::size_t> b{1};
  for (std::size_t g = 2; g <= n_modules; ++g)
    if (cut(rng)) b.push_back(g);
  return Configuration(n_modules, std::move(b));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace detail

/// Field entries lie in [ambient, inlet] and are non-increasing;
/// temperature_at is strictly decreasing in distance.
inline InvariantResult check_thermal_monotonicity(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"thermal monotonicity and bounds", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    ThermalParams p;
    p.k_over_cc = detail::uniform(rng, 0.05, 3.0);
    p.radiator_length = detail::uniform(rng, 0.1, 3.0);
    const double ambient = detail::uniform(rng, -10.0, 45.0);
    const double inlet = ambient + detail::uniform(rng, 0.5, 80.0);
    const std::size_t n = detail::uniform_int(rng, 1, 64);
    const auto f = field_from_sample(p, TraceSample{0.0, inlet, ambient}, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = f.hot_side_temps[i];
      if (t < ambient || t > inlet) {
        r.fail("field entry outside [ambient, inlet]");
        break;
      }
      if (i > 0 && t > f.hot_side_temps[i - 1]) {
        r.fail("field entries increase with module index");
        break;
      }
    }
    const double d1 = detail::uniform(rng, 0.0, p.radiator_length);
    const double d2 = d1 + detail::uniform(rng, 1e-3, p.radiator_length);
    if (!(temperature_at(p, inlet, ambient, d2) < temperature_at(p, inlet, ambient, d1)))
      r.fail("temperature_at not strictly decreasing in distance");
  }
  return r;
}

/// switch_states and configuration_from_switch_states are mutual inverses.
inline InvariantResult check_switch_bijection(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"switch-state bijection", 0, 0, {}};
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = detail::uniform_int(rng, 1, 64);
    const auto c = detail::random_configuration(n, rng);
    const auto states = switch_states(c);
    if (!(configuration_from_switch_states(states) == c)) r.fail("config -> states -> config");
    for (const auto s : states) {
      const auto t = expand(s);
      if (t.series_closed == (t.parallel_top_closed || t.parallel_bottom_closed) ||
          t.parallel_top_closed != t.parallel_bottom_closed)
        r.fail("gap closes both switch types");
    }
    std::vector<GapState> gaps(n - 1);
    for (auto& g : gaps) g = coin(rng) ? GapState::kSeries : GapState::kParallel;
    if (switch_states(configuration_from_switch_states(gaps)) != gaps)
      r.fail("states -> config -> states");
  }
  return r;
}

/// In every group the member currents sum to the array current.
inline InvariantResult check_group_current_conservation(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"group current conservation", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = detail::uniform_int(rng, 1, 48);
    const auto c = detail::random_configuration(n, rng);
    std::vector<double> emfs(n);
    for (auto& e : emfs) e = detail::uniform(rng, 0.0, 3.0);
    const double r_teg = detail::uniform(rng, 0.2, 5.0);
    const double current = detail::uniform(rng, 0.0, 5.0);
    const auto op = solve_at_current(c, emfs, r_teg, current);
    for (std::size_t j = 0; j < c.n_groups(); ++j) {
      double s = 0.0;
      for (std::size_t i = c.group_begin(j); i < c.group_end(j); ++i) s += op.module_currents[i];
      if (std::abs(s - current) > 1e-9 * std::max(1.0, current)) {
        std::ostringstream os;
        os << "group " << j << " sums to " << s << " instead of " << current;
        r.fail(os.str());
        break;
      }
    }
  }
  return r;
}

/// mape(cA, cF) == mape(A, F) for any c != 0.
inline InvariantResult check_mape_scale_invariance(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"MAPE scale invariance", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = detail::uniform_int(rng, 1, 40);
    std::vector<double> a(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = detail::uniform(rng, 0.1, 200.0) * (detail::uniform(rng, 0, 1) < 0.2 ? -1 : 1);
      f[i] = a[i] + detail::uniform(rng, -20.0, 20.0);
    }
    double c = detail::uniform(rng, 0.001, 1000.0);
    if (detail::uniform(rng, 0, 1) < 0.5) c = -c;
    std::vector<double> ca(n), cf(n);
    for (std::size_t i = 0; i < n; ++i) {
      ca[i] = c * a[i];
      cf[i] = c * f[i];
    }
    const double m0 = mape(a, f).percent;
    const double m1 = mape(ca, cf).percent;
    if (std::abs(m0 - m1) > 1e-9 * std::max(1.0, m0)) r.fail("scaled MAPE differs");
  }
  return r;
}

/// Raising per-switch energy never raises DNOR's switch count on a fixed
/// trace. Traces vary coolant flow (K/C_c) so the radiator profile changes
/// shape and INOR candidates actually move.
inline InvariantResult check_dnor_overhead_monotonicity(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"DNOR switch count monotone in overhead", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    SynthSpec spec;
    spec.kind = SynthKind::kRandomWalk;
    spec.duration_s = detail::uniform_int(rng, 30, 90);
    spec.inlet_C = detail::uniform(rng, 70.0, 100.0);
    spec.ambient_C = detail::uniform(rng, 15.0, 35.0);
    spec.walk_sigma_C = detail::uniform(rng, 0.0, 1.5);
    spec.seed = rng();
    const auto trace = synth_trace(spec);

    SimulationSettings s;
    s.n_modules = detail::uniform_int(rng, 8, 24);
    s.thermal.k_over_cc = detail::uniform(rng, 0.3, 1.5);
    const double k0 = s.thermal.k_over_cc;
    const double amp = detail::uniform(rng, 0.0, 0.8);
    const double period = detail::uniform(rng, 10.0, 60.0);
    s.thermal.k_over_cc_schedule = [k0, amp, period](double t) {
      return k0 * (1.0 + amp * std::sin(2.0 * std::numbers::pi * t / period));
    };
    s.model.reconfig.n_min = 2;
    s.model.reconfig.n_max = std::min<std::size_t>(6, s.n_modules);
    s.model.reconfig.objective = Objective::kArraySide;
    s.model.overhead.mppt_settle_delay = detail::uniform(rng, 0.0, 0.2);
    s.model.overhead.per_switch_energy = detail::uniform(rng, 0.0, 0.05);
    s.predictor.window = 3;
    s.predictor.history = 20;

    const auto low = run(trace, s, SchemeSpec::dnor(2));
    s.model.overhead.per_switch_energy += detail::uniform(rng, 0.0, 0.5);
    const auto high = run(trace, s, SchemeSpec::dnor(2));
    if (high.switch_count > low.switch_count) {
      std::ostringstream os;
      os << "case " << r.cases << ": " << high.switch_count << " switches at higher overhead vs "
         << low.switch_count;
      r.fail(os.str());
    }
  }
  return r;
}

/// For a fixed old configuration, candidate and forecast, a decision that
/// switches at higher per-switch energy also switches at lower energy.
inline InvariantResult check_switch_gate_monotonicity(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"DNOR gate monotone in overhead (per decision)", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = detail::uniform_int(rng, 2, 24);
    ControllerModel model;
    model.reconfig.objective = Objective::kArraySide;
    model.overhead.per_switch_energy = detail::uniform(rng, 0.0, 0.1);

    std::vector<TemperatureField> fields;
    double drift = 0.0;
    for (std::size_t t = 0; t < 3; ++t) {
      TemperatureField f;
      f.time = static_cast<double>(t);
      f.ambient_temp = 30.0;
      for (std::size_t i = 0; i < n; ++i)
        f.hot_side_temps.push_back(30.0 + detail::uniform(rng, 0.0, 60.0) + drift);
      std::sort(f.hot_side_temps.begin(), f.hot_side_temps.end(), std::greater<>());
      drift += detail::uniform(rng, -2.0, 2.0);
      fields.push_back(std::move(f));
    }
    const OraclePredictor oracle(fields, 2);
    const auto old_config = detail::random_configuration(n, rng);
    const auto candidate = detail::random_configuration(n, rng);

    const auto low = decide_switch(0.0, fields[0], candidate, old_config, oracle, model);
    model.overhead.per_switch_energy += detail::uniform(rng, 0.0, 1.0);
    const auto high = decide_switch(0.0, fields[0], candidate, old_config, oracle, model);
    if (high.switched && !low.switched) r.fail("switch at higher overhead but not at lower");
  }
  return r;
}

}  // namespace tegrec
