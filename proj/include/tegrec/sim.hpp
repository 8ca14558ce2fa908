#pragma once

// Discrete-time simulation of a reconfigurable TEG array driven by a trace.
//
// Each step: radiator field from the trace, controller at its cadence, then
// the held configuration is operated at its MPP and the battery-side power
// integrated. Switch events are charged overhead priced at the previous
// step's battery power.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tegrec/array.hpp"
#include "tegrec/charger.hpp"
#include "tegrec/error.hpp"
#include "tegrec/overhead.hpp"
#include "tegrec/predictor.hpp"
#include "tegrec/reconfig.hpp"
#include "tegrec/teg.hpp"
#include "tegrec/thermal.hpp"
#include "tegrec/trace.hpp"

namespace tegrec {

enum class SchemeKind { kDnor, kInorPeriodic, kFixed };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::kDnor;
  double period_s = 1.0;                // kInorPeriodic cadence
  std::size_t horizon = 2;              // kDnor t_p; controller runs every t_p + 1 steps
  std::size_t fixed_groups = 10;        // kFixed: uniform groups when `fixed` is unset
  std::optional<Configuration> fixed;   // kFixed: explicit configuration

  static SchemeSpec dnor(std::size_t horizon = 2) {
    SchemeSpec s;
    s.kind = SchemeKind::kDnor;
    s.horizon = horizon;
    return s;
  }
  static SchemeSpec inor_periodic(double period_s = 1.0) {
    SchemeSpec s;
    s.kind = SchemeKind::kInorPeriodic;
    s.period_s = period_s;
    return s;
  }
  static SchemeSpec fixed_uniform(std::size_t groups = 10) {
    SchemeSpec s;
    s.kind = SchemeKind::kFixed;
    s.fixed_groups = groups;
    return s;
  }

  std::string label() const {
    switch (kind) {
      case SchemeKind::kDnor: return "DNOR";
      case SchemeKind::kInorPeriodic: return "INOR";
      case SchemeKind::kFixed: return "FIXED";
    }
    return "?";
  }

  Configuration fixed_configuration(std::size_t n_modules) const {
    if (fixed) {
      if (fixed->n_modules() != n_modules)
        throw DomainError("scheme FIXED: configuration size differs from array size");
      return *fixed;
    }
    return Configuration::uniform(n_modules, fixed_groups);
  }
};

inline SchemeKind parse_scheme_kind(std::string_view name) {
  if (name == "dnor" || name == "DNOR") return SchemeKind::kDnor;
  if (name == "inor" || name == "INOR" || name == "inor_periodic") return SchemeKind::kInorPeriodic;
  if (name == "fixed" || name == "FIXED" || name == "baseline") return SchemeKind::kFixed;
  throw DomainError("unknown scheme '" + std::string(name) + "' (expected dnor, inor, fixed)");
}

struct SimulationSettings {
  std::size_t n_modules = 100;
  ThermalParams thermal;
  ControllerModel model;
  PredictorConfig predictor;
  bool oracle_predictor = false;  // DNOR sees the true future fields

  void validate() const {
    if (n_modules < 1) throw DomainError("sim: n_modules must be >= 1");
    thermal.validate();
    model.teg.validate();
    model.charger.validate();
    model.overhead.validate();
    model.reconfig.validate(n_modules);
    if (!(model.time_step > 0.0)) throw DomainError("sim: time_step must be > 0");
  }
};

struct StepRecord {
  double time = 0.0;
  double array_power = 0.0;    // [W]
  double battery_power = 0.0;  // [W]
  double voltage = 0.0;        // [V]
  double current = 0.0;        // [A]
  std::string boundaries;
  bool switched = false;
  double ideal_power = 0.0;    // [W] every module at its MPP, best charger efficiency
  double ratio_ideal = 0.0;
  double overhead = 0.0;       // [J] charged at this step
};

struct DecisionRecord {
  double time = 0.0;
  std::string old_boundaries;  // empty at bootstrap
  std::string candidate_boundaries;
  double e_old = 0.0;
  double e_new = 0.0;
  double e_overhead = 0.0;
  bool switched = false;
};

struct SimulationReport {
  std::string scheme;
  std::vector<StepRecord> records;
  std::vector<DecisionRecord> decisions;  // DNOR only
  double gross_energy = 0.0;     // [J] sum of battery power * dt
  double switch_overhead = 0.0;  // [J]
  double energy_output = 0.0;    // [J] gross - overhead
  double ideal_energy = 0.0;     // [J]
  std::size_t switch_count = 0;
  std::size_t invocations = 0;   // controller calls
  double avg_runtime_ms = 0.0;   // timing field; not deterministic
};

namespace detail {

inline std::size_t step_count(const Trace& trace, double dt) {
  const double span = trace.end_time() - trace.start_time();
  return static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;
}

inline double ideal_power(std::span<const double> emfs, const TegParams& teg,
                          const ChargerParams& charger) {
  double p = 0.0;
  for (double e : emfs) p += e * e / (4.0 * teg.internal_resistance);
  return p * charger.best_efficiency();
}

}  // namespace detail

/// Temperature fields at every simulation step.
inline std::vector<TemperatureField> trace_fields(const Trace& trace,
                                                  const SimulationSettings& settings) {
  if (trace.empty()) throw DomainError("sim: empty trace");
  const double dt = settings.model.time_step;
  const std::size_t steps = detail::step_count(trace, dt);
  std::vector<TemperatureField> out;
  out.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = trace.start_time() + dt * static_cast<double>(k);
    out.push_back(field_from_sample(settings.thermal, trace.at(t), settings.n_modules));
  }
  return out;
}

inline SimulationReport run(const Trace& trace, const SimulationSettings& settings,
                            const SchemeSpec& scheme) {
  settings.validate();
  if (trace.empty()) throw DomainError("sim: empty trace");
  const auto& model = settings.model;
  const double dt = model.time_step;
  const std::size_t n = settings.n_modules;
  const auto fields = trace_fields(trace, settings);

  std::optional<Configuration> config;
  std::size_t cadence = 0;  // steps between controller calls, 0 = never
  std::unique_ptr<TemperaturePredictor> predictor;

  switch (scheme.kind) {
    case SchemeKind::kFixed:
      config = scheme.fixed_configuration(n);
      break;
    case SchemeKind::kInorPeriodic:
      if (!(scheme.period_s > 0.0)) throw DomainError("scheme INOR: period_s must be > 0");
      cadence = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(scheme.period_s / dt)));
      break;
    case SchemeKind::kDnor: {
      if (scheme.horizon < 1) throw DomainError("scheme DNOR: horizon must be >= 1");
      cadence = scheme.horizon + 1;
      if (settings.oracle_predictor) {
        predictor = std::make_unique<OraclePredictor>(fields, scheme.horizon, dt);
      } else {
        auto cfg = settings.predictor;
        cfg.horizon = scheme.horizon;
        cfg.time_step = dt;
        cfg.history = std::max(cfg.history, cfg.window + cfg.horizon + 1);
        predictor = std::make_unique<MlrPredictor>(cfg);
      }
      break;
    }
  }

  SimulationReport rep;
  rep.scheme = scheme.label();
  rep.records.reserve(fields.size());
  double prev_battery = 0.0;
  double runtime_total_ms = 0.0;

  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& field = fields[k];
    const auto emfs = module_emfs(field, model.teg);
    if (predictor) predictor->observe(field);

    StepRecord rec;
    rec.time = field.time;

    if (cadence != 0 && k % cadence == 0) {
      ++rep.invocations;
      const auto t0 = std::chrono::steady_clock::now();
      std::optional<SwitchDecision> decision;
      Configuration candidate;
      if (scheme.kind == SchemeKind::kDnor) {
        decision = dnor_step(field.time, field, config, *predictor, model);
      } else {
        candidate = inor_detailed(emfs, model.teg, model.charger, model.reconfig).config;
      }
      const double runtime_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      runtime_total_ms += runtime_s * 1e3;

      std::size_t flips = 0;
      bool switched = false;
      if (decision) {
        rep.decisions.push_back(DecisionRecord{field.time, config ? config->to_string() : "",
                                               decision->candidate.to_string(), decision->e_old,
                                               decision->e_new, decision->e_overhead,
                                               decision->switched});
        switched = decision->switched;
        flips = decision->flips;
        if (switched) config = decision->chosen;
      } else {
        // Periodic INOR re-drives the fabric and re-runs MPPT every period.
        switched = true;
        flips = config ? switch_flip_count(*config, candidate) : bootstrap_flip_count(n);
        config = std::move(candidate);
      }
      if (switched) {
        rec.switched = true;
        rec.overhead = model.overhead.energy(prev_battery, flips, runtime_s);
        rep.switch_overhead += rec.overhead;
        ++rep.switch_count;
      }
    }

    const auto mpp = configuration_mpp_summary(*config, emfs, model.teg.internal_resistance);
    rec.current = mpp.current;
    rec.voltage = mpp.voltage;
    rec.array_power = mpp.power;
    rec.battery_power = battery_power(model.charger, std::max(0.0, mpp.voltage), mpp.power);
    rec.boundaries = config->to_string();
    rec.ideal_power = detail::ideal_power(emfs, model.teg, model.charger);
    rec.ratio_ideal = rec.ideal_power > 0.0 ? rec.battery_power / rec.ideal_power : 0.0;

    rep.gross_energy += rec.battery_power * dt;
    rep.ideal_energy += rec.ideal_power * dt;
    prev_battery = rec.battery_power;
    rep.records.push_back(std::move(rec));
  }

  rep.energy_output = rep.gross_energy - rep.switch_overhead;
  rep.avg_runtime_ms = rep.invocations ? runtime_total_ms / rep.invocations : 0.0;
  return rep;
}

/// One report per scheme over the identical trace.
inline std::vector<SimulationReport> compare(const Trace& trace, const SimulationSettings& settings,
                                             const std::vector<SchemeSpec>& schemes) {
  if (schemes.empty()) throw DomainError("compare: need at least one scheme");
  std::vector<SimulationReport> out;
  out.reserve(schemes.size());
  for (const auto& s : schemes) out.push_back(run(trace, settings, s));
  return out;
}

}  // namespace tegrec
