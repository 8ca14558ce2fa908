#pragma once

// Run configuration for the tegrec CLI: a JSON document with one block per
// model component. Every key is optional; unknown keys are rejected. Errors
// carry the dotted path of the offending field (e.g. "charger.v_min").
// See config/example.json for the full annotated set.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tegrec/charger.hpp"
#include "tegrec/error.hpp"
#include "tegrec/sim.hpp"
#include "tegrec/trace.hpp"
#include "tegrec/validation.hpp"

namespace tegrec::cli {

using nlohmann::json;

struct CurvesOptions {
  std::vector<double> delta_t{30.0, 40.0, 50.0, 60.0, 70.0};
  std::size_t points = 101;
};

struct ValidateOptions {
  std::size_t n_modules = 12;
  std::size_t n_min = 2;
  std::size_t n_max = 4;
  std::size_t instances = 500;
  std::size_t property_cases = 1000;
};

struct ScalingOptions {
  std::size_t calls = 100;
  TimedAlgorithm algorithm = TimedAlgorithm::kInor;
};

struct RunConfig {
  SimulationSettings settings;
  std::optional<std::string> trace_file;
  SynthSpec synth{SynthKind::kRandomWalk};
  std::vector<SchemeSpec> schemes{SchemeSpec::dnor(), SchemeSpec::inor_periodic(),
                                  SchemeSpec::fixed_uniform()};
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool n_range_from_charger = false;
  CurvesOptions curves;
  ValidateOptions validate;
  ScalingOptions scaling;
};

namespace detail {

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  Reader child(const std::string& key) const { return Reader(node_.at(key), field(key)); }

  const json& raw(const std::string& key) const { return node_.at(key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    out = v.get<double>();
  }

  void count(const std::string& key, std::size_t& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(field(key), "expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void u64(const std::string& key, std::uint64_t& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(field(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    out = v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, _] : node_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ConfigError(field(k), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
};

template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

inline void read_thermal(const Reader& r, ThermalParams& p) {
  r.only({"k_over_cc", "radiator_length", "ambient_mode", "fixed_ambient_C"});
  r.number("k_over_cc", p.k_over_cc);
  r.number("radiator_length", p.radiator_length);
  r.number("fixed_ambient_C", p.fixed_ambient);
  if (auto m = r.string("ambient_mode")) {
    if (*m == "per_sample") p.ambient_mode = AmbientMode::kPerSample;
    else if (*m == "fixed") p.ambient_mode = AmbientMode::kFixed;
    else throw ConfigError(r.field("ambient_mode"), "expected 'per_sample' or 'fixed'");
  }
}

inline void read_teg(const Reader& r, TegParams& p) {
  r.only({"seebeck_per_couple", "n_couples", "internal_resistance"});
  r.number("seebeck_per_couple", p.seebeck_per_couple);
  r.number("n_couples", p.n_couples);
  r.number("internal_resistance", p.internal_resistance);
}

inline void read_charger(const Reader& r, ChargerParams& p, const std::filesystem::path& base) {
  r.only({"target_voltage", "peak_efficiency", "droop", "floor_efficiency", "v_min", "v_max",
          "efficiency_table"});
  r.number("target_voltage", p.target_voltage);
  r.number("peak_efficiency", p.peak_efficiency);
  r.number("droop", p.droop);
  r.number("floor_efficiency", p.floor_efficiency);
  r.number("v_min", p.v_min);
  r.number("v_max", p.v_max);
  if (auto t = r.string("efficiency_table")) {
    const auto path = std::filesystem::path(*t).is_absolute() ? std::filesystem::path(*t) : base / *t;
    try {
      p.table = load_efficiency_table(path.string());
    } catch (const ParseError& e) {
      throw ConfigError(r.field("efficiency_table"), e.what());
    }
  }
}

inline void read_overhead(const Reader& r, OverheadParams& p) {
  r.only({"sensing_delay_s", "compute_delay_s", "reconfig_delay_s", "mppt_settle_delay_s",
          "per_switch_energy_J", "live_compute_delay"});
  r.number("sensing_delay_s", p.sensing_delay);
  r.number("compute_delay_s", p.compute_delay);
  r.number("reconfig_delay_s", p.reconfig_delay);
  r.number("mppt_settle_delay_s", p.mppt_settle_delay);
  r.number("per_switch_energy_J", p.per_switch_energy);
  r.boolean("live_compute_delay", p.live_compute_delay);
}

inline void read_reconfig(const Reader& r, ReconfigParams& p, bool& from_charger) {
  r.only({"n_min", "n_max", "tie_break", "objective", "n_range_from_charger"});
  r.count("n_min", p.n_min);
  r.count("n_max", p.n_max);
  r.boolean("n_range_from_charger", from_charger);
  if (auto t = r.string("tie_break")) {
    if (*t == "smaller") p.tie_break = TieBreak::kSmallerBoundary;
    else if (*t == "larger") p.tie_break = TieBreak::kLargerBoundary;
    else throw ConfigError(r.field("tie_break"), "expected 'smaller' or 'larger'");
  }
  if (auto o = r.string("objective")) {
    if (*o == "battery") p.objective = Objective::kBatterySide;
    else if (*o == "array") p.objective = Objective::kArraySide;
    else throw ConfigError(r.field("objective"), "expected 'battery' or 'array'");
  }
}

inline void read_predictor(const Reader& r, PredictorConfig& p, bool& oracle) {
  r.only({"window", "horizon", "history", "pooling", "ridge", "refit_interval", "oracle"});
  r.count("window", p.window);
  r.count("horizon", p.horizon);
  r.count("history", p.history);
  r.boolean("pooling", p.pooling);
  r.number("ridge", p.ridge);
  r.count("refit_interval", p.refit_interval);
  r.boolean("oracle", oracle);
}

inline void read_synth(const Reader& r, SynthSpec& s) {
  r.only({"kind", "duration_s", "inlet_C", "ambient_C", "ramp_C", "amplitude_C", "period_s",
          "walk_sigma_C", "walk_reversion", "min_delta_C"});
  if (auto k = r.string("kind")) checked(r.field("kind"), [&] { s.kind = parse_synth_kind(*k); });
  r.count("duration_s", s.duration_s);
  r.number("inlet_C", s.inlet_C);
  r.number("ambient_C", s.ambient_C);
  r.number("ramp_C", s.ramp_C);
  r.number("amplitude_C", s.amplitude_C);
  r.number("period_s", s.period_s);
  r.number("walk_sigma_C", s.walk_sigma_C);
  r.number("walk_reversion", s.walk_reversion);
  r.number("min_delta_C", s.min_delta_C);
}

inline SchemeSpec read_scheme(const Reader& r, std::size_t default_horizon, std::size_t n_modules) {
  r.only({"kind", "period_s", "horizon", "groups", "boundaries"});
  SchemeSpec s;
  s.horizon = default_horizon;
  const auto kind = r.string("kind");
  if (!kind) throw ConfigError(r.field("kind"), "missing");
  checked(r.field("kind"), [&] { s.kind = parse_scheme_kind(*kind); });
  r.number("period_s", s.period_s);
  r.count("horizon", s.horizon);
  r.count("groups", s.fixed_groups);
  if (auto b = r.string("boundaries"))
    checked(r.field("boundaries"), [&] { s.fixed = Configuration::parse(*b, n_modules); });
  return s;
}

}  // namespace detail

/// Scheme from a bare CLI name (`--scheme dnor`).
inline SchemeSpec scheme_from_name(const std::string& name, std::size_t horizon) {
  SchemeSpec s;
  detail::checked("--scheme", [&] { s.kind = parse_scheme_kind(name); });
  s.horizon = horizon;
  return s;
}

/// Checks every block's invariants; throws ConfigError naming the block.
inline void validate(const RunConfig& c) {
  const auto& s = c.settings;
  detail::checked("array_size", [&] {
    if (s.n_modules < 1) throw DomainError("must be >= 1");
  });
  detail::checked("thermal", [&] { s.thermal.validate(); });
  detail::checked("teg", [&] { s.model.teg.validate(); });
  detail::checked("charger", [&] { s.model.charger.validate(); });
  detail::checked("overhead", [&] { s.model.overhead.validate(); });
  detail::checked("reconfig", [&] { s.model.reconfig.validate(s.n_modules); });
  detail::checked("predictor", [&] { s.predictor.validate(); });
  detail::checked("time_step_s", [&] {
    if (!(s.model.time_step > 0.0)) throw DomainError("must be > 0");
  });
  if (!c.trace_file) detail::checked("trace.synth", [&] { c.synth.validate(); });
  for (std::size_t k = 0; k < c.schemes.size(); ++k) {
    const auto path = "schemes[" + std::to_string(k) + "]";
    detail::checked(path, [&] {
      const auto& sc = c.schemes[k];
      if (sc.kind == SchemeKind::kFixed) (void)sc.fixed_configuration(s.n_modules);
      if (sc.kind == SchemeKind::kInorPeriodic && !(sc.period_s > 0.0))
        throw DomainError("period_s must be > 0");
      if (sc.kind == SchemeKind::kDnor && sc.horizon < 1) throw DomainError("horizon must be >= 1");
    });
  }
  detail::checked("curves", [&] {
    if (c.curves.delta_t.empty()) throw DomainError("delta_t needs at least one value");
    if (c.curves.points < 2) throw DomainError("points must be >= 2");
    for (double d : c.curves.delta_t)
      if (!(d >= 0.0)) throw DomainError("delta_t values must be >= 0");
  });
  detail::checked("validate", [&] {
    const auto& v = c.validate;
    if (v.n_modules < 1 || v.n_modules > kBruteForceMaxModules)
      throw DomainError("array_size must be in [1, 20] for the exhaustive oracle");
    if (v.n_min < 1 || v.n_min > v.n_max || v.n_max > v.n_modules)
      throw DomainError("need 1 <= n_min <= n_max <= array_size");
    if (v.instances < 1) throw DomainError("instances must be >= 1");
  });
  detail::checked("scaling", [&] {
    if (c.scaling.calls < 1) throw DomainError("calls must be >= 1");
  });
}

/// Parses a configuration document. Relative file paths inside it resolve
/// against `base_dir`.
inline RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir = ".") {
  RunConfig c;
  const detail::Reader root(doc, "");
  root.only({"array_size", "seed", "time_step_s", "out_dir", "thermal", "teg", "charger",
             "overhead", "reconfig", "predictor", "trace", "schemes", "curves", "validate",
             "scaling"});
  root.count("array_size", c.settings.n_modules);
  root.u64("seed", c.seed);
  root.number("time_step_s", c.settings.model.time_step);
  if (auto o = root.string("out_dir")) c.out_dir = *o;
  if (root.has("thermal")) detail::read_thermal(root.child("thermal"), c.settings.thermal);
  if (root.has("teg")) detail::read_teg(root.child("teg"), c.settings.model.teg);
  if (root.has("charger"))
    detail::read_charger(root.child("charger"), c.settings.model.charger, base_dir);
  if (root.has("overhead")) detail::read_overhead(root.child("overhead"), c.settings.model.overhead);
  if (root.has("reconfig"))
    detail::read_reconfig(root.child("reconfig"), c.settings.model.reconfig, c.n_range_from_charger);
  if (root.has("predictor"))
    detail::read_predictor(root.child("predictor"), c.settings.predictor,
                           c.settings.oracle_predictor);

  if (root.has("trace")) {
    const auto t = root.child("trace");
    t.only({"file", "synth"});
    if (t.has("file") && t.has("synth"))
      throw ConfigError(t.field("file"), "give either 'file' or 'synth', not both");
    if (auto f = t.string("file")) {
      const std::filesystem::path p(*f);
      c.trace_file = (p.is_absolute() ? p : base_dir / p).string();
    }
    if (t.has("synth")) detail::read_synth(t.child("synth"), c.synth);
  }

  if (root.has("schemes")) {
    const auto& arr = root.raw("schemes");
    if (!arr.is_array()) throw ConfigError("schemes", "expected an array");
    c.schemes.clear();
    for (std::size_t k = 0; k < arr.size(); ++k)
      c.schemes.push_back(detail::read_scheme(
          detail::Reader(arr[k], "schemes[" + std::to_string(k) + "]"),
          c.settings.predictor.horizon, c.settings.n_modules));
  } else {
    for (auto& s : c.schemes) s.horizon = c.settings.predictor.horizon;
  }

  if (root.has("curves")) {
    const auto r = root.child("curves");
    r.only({"delta_t", "points"});
    if (r.has("delta_t")) {
      const auto& a = r.raw("delta_t");
      if (!a.is_array()) throw ConfigError(r.field("delta_t"), "expected an array of numbers");
      c.curves.delta_t.clear();
      for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError(r.field("delta_t"), "expected an array of numbers");
        c.curves.delta_t.push_back(v.get<double>());
      }
    }
    r.count("points", c.curves.points);
  }
  if (root.has("validate")) {
    const auto r = root.child("validate");
    r.only({"array_size", "n_min", "n_max", "instances", "property_cases"});
    r.count("array_size", c.validate.n_modules);
    r.count("n_min", c.validate.n_min);
    r.count("n_max", c.validate.n_max);
    r.count("instances", c.validate.instances);
    r.count("property_cases", c.validate.property_cases);
  }
  if (root.has("scaling")) {
    const auto r = root.child("scaling");
    r.only({"calls", "algorithm"});
    r.count("calls", c.scaling.calls);
    if (auto a = r.string("algorithm")) {
      if (*a == "inor") c.scaling.algorithm = TimedAlgorithm::kInor;
      else if (*a == "brute-force") c.scaling.algorithm = TimedAlgorithm::kBruteForce;
      else throw ConfigError(r.field("algorithm"), "expected 'inor' or 'brute-force'");
    }
  }
  c.synth.seed = c.seed;
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path());
}

}  // namespace tegrec::cli
