#pragma once

// Subcommand implementations for the tegrec CLI. Each writes its files under
// the output directory and a human-readable report to `log`.
//
// Deterministic outputs and timing outputs never share a file: anything
// measured with a clock goes to *timing* files only.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "tegrec/charger.hpp"
#include "tegrec/invariants.hpp"
#include "tegrec/sim.hpp"
#include "tegrec/teg.hpp"
#include "tegrec/trace.hpp"
#include "tegrec/validation.hpp"

namespace tegrec::cli {

namespace fs = std::filesystem;

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

inline void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace detail

/// Trace from the configured file or synthetic generator.
inline Trace load_run_trace(const RunConfig& cfg) {
  if (cfg.trace_file) return load_trace(*cfg.trace_file);
  return synth_trace(cfg.synth);
}

/// Simulation settings after config-level derivations (n range from charger).
inline SimulationSettings resolve_settings(const RunConfig& cfg, const Trace& trace) {
  SimulationSettings s = cfg.settings;
  if (cfg.n_range_from_charger) {
    const auto field = field_from_sample(s.thermal, trace[0], s.n_modules);
    double v = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) v += module_mpp(s.model.teg, field.delta_t(i)).voltage;
    v /= static_cast<double>(field.size());
    GroupCountRange range;
    ::tegrec::cli::detail::checked("reconfig.n_range_from_charger",
                                   [&] { range = derive_n_range(s.model.charger, v); });
    s.model.reconfig.n_min = std::min(range.n_min, s.n_modules);
    s.model.reconfig.n_max = std::min(range.n_max, s.n_modules);
  }
  return s;
}

// ---------------------------------------------------------------------------
// curves

inline constexpr const char* kCurveHeader = "voltage_V,current_A,power_W";

inline std::vector<fs::path> cmd_curves(const RunConfig& cfg, const fs::path& out_dir,
                                        std::ostream& log) {
  std::vector<fs::path> written;
  const auto& teg = cfg.settings.model.teg;
  const fs::path mpp_path = out_dir / "iv_curve_mpp.csv";
  auto mpp_out = detail::open_out(mpp_path);
  mpp_out << "delta_T_K,voltage_V,current_A,power_W\n";
  for (double dt : cfg.curves.delta_t) {
    const fs::path path = out_dir / ("iv_curve_dT_" + num(dt) + ".csv");
    auto out = detail::open_out(path);
    out << kCurveHeader << '\n';
    for (const auto& p : iv_curve(teg, dt, cfg.curves.points))
      out << num(p.voltage) << ',' << num(p.current) << ',' << num(p.power) << '\n';
    detail::finish(out, path);
    written.push_back(path);
    const auto m = module_mpp(teg, dt);
    mpp_out << num(dt) << ',' << num(m.voltage) << ',' << num(m.current) << ',' << num(m.power) << '\n';
    log << "dT=" << num(dt) << " K  MPP " << fixed(m.voltage, 3) << " V  " << fixed(m.current, 3)
        << " A  " << fixed(m.power, 3) << " W  -> " << path.string() << '\n';
  }
  detail::finish(mpp_out, mpp_path);
  written.push_back(mpp_path);
  return written;
}

// ---------------------------------------------------------------------------
// run / compare

inline constexpr const char* kRecordsHeader =
    "time_s,array_power_W,battery_power_W,voltage_V,current_A,boundaries,switched,ratio_ideal";

inline void write_records(std::ostream& out, const SimulationReport& rep) {
  out << kRecordsHeader << '\n';
  for (const auto& r : rep.records)
    out << num(r.time) << ',' << num(r.array_power) << ',' << num(r.battery_power) << ','
        << num(r.voltage) << ',' << num(r.current) << ",\"" << r.boundaries << "\","
        << (r.switched ? 1 : 0) << ',' << num(r.ratio_ideal) << '\n';
}

inline void write_decisions(std::ostream& out, const SimulationReport& rep) {
  out << "time_s,old_boundaries,candidate_boundaries,e_old_J,e_new_J,e_overhead_J,switched\n";
  for (const auto& d : rep.decisions)
    out << num(d.time) << ",\"" << d.old_boundaries << "\",\"" << d.candidate_boundaries << "\","
        << num(d.e_old) << ',' << num(d.e_new) << ',' << num(d.e_overhead) << ','
        << (d.switched ? 1 : 0) << '\n';
}

inline double mean_ratio(const SimulationReport& rep) {
  double s = 0.0;
  for (const auto& r : rep.records) s += r.ratio_ideal;
  return rep.records.empty() ? 0.0 : s / static_cast<double>(rep.records.size());
}

/// Deterministic key-value summary (Table-I rows plus bookkeeping).
inline void write_summary_kv(std::ostream& out, const SimulationReport& rep) {
  out << "scheme=" << rep.scheme << '\n'
      << "energy_output_net_J=" << num(rep.energy_output) << '\n'
      << "energy_output_gross_J=" << num(rep.gross_energy) << '\n'
      << "switch_overhead_J=" << num(rep.switch_overhead) << '\n'
      << "switch_count=" << rep.switch_count << '\n'
      << "controller_invocations=" << rep.invocations << '\n'
      << "ideal_energy_J=" << num(rep.ideal_energy) << '\n'
      << "mean_ratio_ideal=" << num(mean_ratio(rep)) << '\n'
      << "steps=" << rep.records.size() << '\n';
}

inline void write_timing_kv(std::ostream& out, const std::vector<SimulationReport>& reps) {
  for (const auto& r : reps) out << r.scheme << ".avg_runtime_ms=" << num(r.avg_runtime_ms) << '\n';
}

/// Side-by-side table. Timing is appended only when `with_timing` is set.
inline std::string summary_table(const std::vector<SimulationReport>& reps, bool with_timing) {
  std::ostringstream os;
  auto row = [&](const std::string& label, auto value) {
    os << std::left << std::setw(30) << label;
    for (const auto& r : reps) os << std::right << std::setw(14) << value(r);
    os << '\n';
  };
  row("", [](const SimulationReport& r) { return r.scheme; });
  row("Energy Output, net (J)", [](const auto& r) { return fixed(r.energy_output, 1); });
  row("Energy Output, gross (J)", [](const auto& r) { return fixed(r.gross_energy, 1); });
  row("Switch Overhead (J)", [](const auto& r) { return fixed(r.switch_overhead, 1); });
  row("Switch Count", [](const auto& r) { return std::to_string(r.switch_count); });
  row("Controller Invocations", [](const auto& r) { return std::to_string(r.invocations); });
  row("Mean Ratio to P_ideal", [](const auto& r) { return fixed(mean_ratio(r), 4); });
  if (with_timing)
    row("Average Runtime (ms) [timing]", [](const auto& r) { return fixed(r.avg_runtime_ms, 4); });
  return os.str();
}

inline std::vector<SimulationReport> simulate(const RunConfig& cfg) {
  const auto trace = load_run_trace(cfg);
  const auto settings = resolve_settings(cfg, trace);
  auto reps = compare(trace, settings, cfg.schemes);
  std::map<std::string, int> seen;
  for (auto& r : reps)
    if (++seen[r.scheme] > 1) r.scheme += "_" + std::to_string(seen[r.scheme]);
  return reps;
}

inline void write_scheme_files(const SimulationReport& rep, const fs::path& out_dir) {
  {
    const auto p = out_dir / (rep.scheme + "_records.csv");
    auto out = detail::open_out(p);
    write_records(out, rep);
    detail::finish(out, p);
  }
  {
    const auto p = out_dir / (rep.scheme + "_summary.kv");
    auto out = detail::open_out(p);
    write_summary_kv(out, rep);
    detail::finish(out, p);
  }
  if (!rep.decisions.empty()) {
    const auto p = out_dir / (rep.scheme + "_decisions.csv");
    auto out = detail::open_out(p);
    write_decisions(out, rep);
    detail::finish(out, p);
  }
}

inline std::vector<SimulationReport> cmd_run(const RunConfig& cfg, const fs::path& out_dir,
                                             std::ostream& log) {
  auto reps = simulate(cfg);
  for (const auto& r : reps) {
    write_scheme_files(r, out_dir);
    const auto p = out_dir / (r.scheme + "_summary.txt");
    auto out = detail::open_out(p);
    out << summary_table({r}, false);
    detail::finish(out, p);
  }
  const auto tp = out_dir / "timing.kv";
  auto timing = detail::open_out(tp);
  write_timing_kv(timing, reps);
  detail::finish(timing, tp);
  log << summary_table(reps, true);
  return reps;
}

inline std::vector<SimulationReport> cmd_compare(const RunConfig& cfg, const fs::path& out_dir,
                                                 std::ostream& log) {
  if (cfg.schemes.size() < 2) throw ConfigError("schemes", "compare needs at least two schemes");
  auto reps = simulate(cfg);
  for (const auto& r : reps) write_scheme_files(r, out_dir);
  {
    const auto p = out_dir / "comparison.txt";
    auto out = detail::open_out(p);
    out << summary_table(reps, false);
    detail::finish(out, p);
  }
  {
    const auto p = out_dir / "comparison.kv";
    auto out = detail::open_out(p);
    for (const auto& r : reps) {
      std::ostringstream one;
      write_summary_kv(one, r);
      std::istringstream lines(one.str());
      std::string line;
      while (std::getline(lines, line))
        if (line.rfind("scheme=", 0) != 0) out << r.scheme << '.' << line << '\n';
    }
    detail::finish(out, p);
  }
  {
    const auto p = out_dir / "timing.kv";
    auto out = detail::open_out(p);
    write_timing_kv(out, reps);
    detail::finish(out, p);
  }
  log << summary_table(reps, true);
  return reps;
}

// ---------------------------------------------------------------------------
// validate

struct ValidationOutcome {
  GapStudy gaps;
  std::vector<InvariantResult> invariants;
  bool all_passed = false;
};

/// numeric_mppt lands within the one-step bound of the analytic MPP.
inline InvariantResult check_mppt_agreement(std::size_t cases, std::uint64_t seed) {
  InvariantResult r{"numeric MPPT within one-step bound of analytic MPP", 0, 0, {}};
  std::mt19937_64 rng(seed);
  for (; r.cases < cases; ++r.cases) {
    const std::size_t n = ::tegrec::detail::uniform_int(rng, 1, 24);
    const auto c = ::tegrec::detail::random_configuration(n, rng);
    const auto field = random_radiator_field(n, rng);
    const TegParams teg;
    const auto emfs = module_emfs(field, teg);
    const double step = ::tegrec::detail::uniform(rng, 0.005, 0.1);
    const auto num = numeric_mppt(c, emfs, teg.internal_resistance, step);
    const auto exact = configuration_mpp_summary(c, emfs, teg.internal_resistance);
    const double bound = mppt_step_bound(c, emfs, teg.internal_resistance, step);
    if (!num.converged || exact.power - num.point.total_power > bound + 1e-12 ||
        num.point.total_power > exact.power + 1e-12)
      r.fail("MPPT outside one-step bound");
  }
  return r;
}

inline ValidationOutcome cmd_validate(const RunConfig& cfg, const fs::path& out_dir,
                                      std::ostream& log) {
  const auto& v = cfg.validate;
  const auto& model = cfg.settings.model;
  ReconfigParams band = model.reconfig;
  band.n_min = v.n_min;
  band.n_max = v.n_max;
  band.objective = Objective::kArraySide;

  ValidationOutcome res;
  res.gaps = run_gap_study(v.n_modules, band, v.instances, cfg.seed, model.teg, model.charger);
  {
    const auto p = out_dir / "validate_gaps.csv";
    auto out = detail::open_out(p);
    out << "instance,gap\n";
    for (std::size_t k = 0; k < res.gaps.gaps.size(); ++k) out << k << ',' << num(res.gaps.gaps[k]) << '\n';
    detail::finish(out, p);
  }
  const auto& g = res.gaps;
  log << "INOR vs exhaustive oracle: N=" << v.n_modules << ", n in [" << v.n_min << ", " << v.n_max
      << "], " << v.instances << " seeded fields (array-side power)\n"
      << "  gap = 1 - P_inor / P_oracle\n"
      << "  mean   " << fixed(100 * g.mean, 4) << " %\n"
      << "  median " << fixed(100 * g.median, 4) << " %\n"
      << "  p99    " << fixed(100 * g.p99, 4) << " %\n"
      << "  max    " << fixed(100 * g.max, 4) << " %\n"
      << "  exact  " << g.exact << " / " << v.instances << "\n\n";

  const std::size_t n = v.property_cases;
  const std::uint64_t s = cfg.seed;
  res.invariants = {check_thermal_monotonicity(n, s + 1),
                    check_switch_bijection(n, s + 2),
                    check_group_current_conservation(n, s + 3),
                    check_mape_scale_invariance(n, s + 4),
                    check_mppt_agreement(n, s + 5),
                    check_switch_gate_monotonicity(n, s + 6),
                    check_dnor_overhead_monotonicity(n, s + 7)};
  res.all_passed = true;
  for (const auto& r : res.invariants) {
    res.all_passed = res.all_passed && r.passed();
    log << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.cases - r.failures << "/"
        << r.cases << ")";
    if (!r.passed()) log << ": " << r.detail;
    log << '\n';
  }
  return res;
}

// ---------------------------------------------------------------------------
// scaling

inline ScalingReport cmd_scaling(const RunConfig& cfg, const std::vector<std::size_t>& sizes,
                                 const fs::path& out_dir, std::ostream& log) {
  const auto& model = cfg.settings.model;
  ReconfigParams p = model.reconfig;
  if (cfg.scaling.algorithm == TimedAlgorithm::kBruteForce) {
    p.n_min = cfg.validate.n_min;
    p.n_max = cfg.validate.n_max;
  }
  const auto rep = measure_runtime(cfg.scaling.algorithm, sizes, model.teg, model.charger, p,
                                   cfg.scaling.calls, cfg.seed);
  const auto path = out_dir / "scaling_timing.csv";
  auto out = detail::open_out(path);
  out << "n_modules,median_ms,calls\n";
  log << "algorithm " << to_string(rep.algorithm) << ", " << cfg.scaling.calls << " calls per size\n"
      << std::right << std::setw(10) << "N" << std::setw(14) << "median_ms" << std::setw(12)
      << "ratio" << '\n';
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    out << r.n_modules << ',' << num(r.median_ms) << ',' << r.calls << '\n';
    log << std::setw(10) << r.n_modules << std::setw(14) << fixed(r.median_ms, 6) << std::setw(12)
        << (k == 0 ? std::string("-") : fixed(r.median_ms / rep.rows[k - 1].median_ms, 2)) << '\n';
  }
  detail::finish(out, path);
  log << "slope_ms_per_module " << num(rep.fit.slope) << '\n'
      << "intercept_ms " << num(rep.fit.intercept) << '\n'
      << "r_squared " << fixed(rep.fit.r_squared, 4) << '\n'
      << "doubling_ratio " << fixed(rep.doubling_ratio, 4) << '\n';
  return rep;
}

// ---------------------------------------------------------------------------
// synth-trace

inline fs::path cmd_synth_trace(const RunConfig& cfg, const fs::path& path, std::ostream& log) {
  const auto trace = synth_trace(cfg.synth);
  auto out = detail::open_out(path);
  write_trace(out, trace);
  detail::finish(out, path);
  log << "wrote " << trace.size() << " samples (" << to_string(cfg.synth.kind) << ", seed "
      << cfg.synth.seed << ") to " << path.string() << '\n';
  return path;
}

}  // namespace tegrec::cli
