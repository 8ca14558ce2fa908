#pragma once

// Array reconfiguration.
//
//  * inor              greedy balanced partition, one left-to-right pass per
//                      group count n, O((n_max - n_min + 1) * N)
//  * brute_force_best  exhaustive search over contiguous partitions (N <= 20)
//  * dnor_step         prediction-gated switching around inor

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tegrec/array.hpp"
#include "tegrec/charger.hpp"
#include "tegrec/error.hpp"
#include "tegrec/overhead.hpp"
#include "tegrec/predictor.hpp"
#include "tegrec/teg.hpp"
#include "tegrec/thermal.hpp"

namespace tegrec {

enum class TieBreak { kSmallerBoundary, kLargerBoundary };

/// What a candidate configuration is scored on.
enum class Objective {
  kBatterySide,  // charger efficiency applied to the array MPP
  kArraySide,    // raw array MPP power
};

struct ReconfigParams {
  std::size_t n_min = 8;
  std::size_t n_max = 24;
  TieBreak tie_break = TieBreak::kSmallerBoundary;
  Objective objective = Objective::kBatterySide;

  void validate(std::size_t n_modules) const {
    if (n_min < 1 || n_min > n_max)
      throw DomainError("reconfig: need 1 <= n_min <= n_max");
    if (n_max > n_modules) throw DomainError("reconfig: n_max exceeds the number of modules");
  }
};

/// Everything needed to score a configuration against a temperature field.
struct ControllerModel {
  TegParams teg;
  ChargerParams charger;
  ReconfigParams reconfig;
  OverheadParams overhead;
  double time_step = 1.0;  // [s]
};

inline std::vector<double> module_emfs(const TemperatureField& field, const TegParams& teg) {
  std::vector<double> e(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) e[i] = emf(teg, field.delta_t(i));
  return e;
}

/// Score of a configuration's MPP under the chosen objective [W].
inline double mpp_score(const Configuration& config, std::span<const double> emfs,
                        const TegParams& teg, const ChargerParams& charger, Objective objective) {
  const auto mpp = configuration_mpp_summary(config, emfs, teg.internal_resistance);
  if (objective == Objective::kArraySide) return mpp.power;
  return battery_power(charger, std::max(0.0, mpp.voltage), mpp.power);
}

/// Greedy placement for a fixed group count n. Group j's first module g_j is
/// chosen left to right so that the MPP-current sum of group j-1 is as close
/// as possible to I_ideal = sum(I_MPP) / n. g_j is capped at N - (n - j) so
/// the remaining groups stay nonempty; the last group takes the remainder.
inline Configuration balance_groups(std::span<const double> mpp_currents, std::size_t n,
                                    TieBreak tie_break = TieBreak::kSmallerBoundary) {
  const std::size_t total = mpp_currents.size();
  if (n < 1 || n > total) throw DomainError("balance_groups: need 1 <= n <= N");
  double sum_all = 0.0;
  for (double c : mpp_currents) sum_all += c;
  const double ideal = sum_all / static_cast<double>(n);

  std::vector<std::size_t> b;
  b.reserve(n);
  b.push_back(1);
  std::size_t start = 0;  // 0-based first module of the group being closed
  for (std::size_t j = 2; j <= n; ++j) {
    const std::size_t last_start = total - (n - j) - 1;  // 0-based cap on g_j
    double sum = 0.0;
    double best_dev = std::numeric_limits<double>::infinity();
    std::size_t best = start + 1;
    for (std::size_t s = start + 1; s <= last_start; ++s) {
      sum += mpp_currents[s - 1];
      const double dev = std::abs(sum - ideal);
      const bool better = tie_break == TieBreak::kSmallerBoundary ? dev < best_dev
                                                                  : dev <= best_dev;
      if (better) {
        best_dev = dev;
        best = s;
      }
      // Past I_ideal the deviation can only grow.
      if (sum >= ideal && (tie_break == TieBreak::kSmallerBoundary || dev > best_dev)) break;
    }
    b.push_back(best + 1);
    start = best;
  }
  return Configuration(total, std::move(b));
}

struct InorResult {
  Configuration config;
  double score = 0.0;  // objective value of config [W]
  std::size_t n_groups = 0;
};

inline InorResult inor_detailed(std::span<const double> emfs, const TegParams& teg,
                                const ChargerParams& charger, const ReconfigParams& params) {
  params.validate(emfs.size());
  std::vector<double> currents(emfs.size());
  for (std::size_t i = 0; i < emfs.size(); ++i) currents[i] = mpp_current_from_emf(teg, emfs[i]);

  std::optional<InorResult> best;
  for (std::size_t n = params.n_min; n <= params.n_max; ++n) {
    auto cand = balance_groups(currents, n, params.tie_break);
    const double score = mpp_score(cand, emfs, teg, charger, params.objective);
    if (!best || score > best->score) best = InorResult{std::move(cand), score, n};
  }
  return *best;
}

inline Configuration inor(const TemperatureField& field, const TegParams& teg,
                          const ChargerParams& charger, const ReconfigParams& params) {
  if (field.size() < params.n_max) throw DomainError("inor: N < n_max");
  const auto emfs = module_emfs(field, teg);
  return inor_detailed(emfs, teg, charger, params).config;
}

inline constexpr std::size_t kBruteForceMaxModules = 20;

/// Exhaustive search over every contiguous partition with n in
/// [n_min, n_max]. Ties go to fewer groups, then lexicographically smaller
/// boundaries.
inline InorResult brute_force_best_detailed(std::span<const double> emfs, const TegParams& teg,
                                            const ChargerParams& charger,
                                            const ReconfigParams& params) {
  const std::size_t total = emfs.size();
  if (total > kBruteForceMaxModules)
    throw DomainError("brute_force_best: N = " + std::to_string(total) +
                      " is too large for exhaustive search (limit " +
                      std::to_string(kBruteForceMaxModules) + "); use inor instead");
  params.validate(total);
  const double r = teg.internal_resistance;

  std::vector<double> prefix(total + 1, 0.0);
  for (std::size_t i = 0; i < total; ++i) prefix[i + 1] = prefix[i] + emfs[i];

  std::optional<InorResult> best;
  std::vector<std::size_t> b;  // 1-based group starts
  for (std::size_t n = params.n_min; n <= params.n_max; ++n) {
    b.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) b[j] = j + 1;
    while (true) {
      double a = 0.0;
      double inv = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = b[j] - 1;
        const std::size_t hi = j + 1 < n ? b[j + 1] - 1 : total;
        const double m = static_cast<double>(hi - lo);
        a += (prefix[hi] - prefix[lo]) / m;
        inv += 1.0 / m;
      }
      const double bq = r * inv;
      const double power = a * a / (4.0 * bq);
      const double score = params.objective == Objective::kArraySide
                               ? power
                               : battery_power(charger, std::max(0.0, 0.5 * a), power);
      if (!best || score > best->score) best = InorResult{Configuration(total, b), score, n};

      // Next combination of the cut positions b[1..n-1] in lexicographic order.
      std::size_t j = n;
      while (j > 1 && b[j - 1] == total - (n - j)) --j;
      if (j <= 1) break;
      ++b[j - 1];
      for (std::size_t k = j; k < n; ++k) b[k] = b[k - 1] + 1;
    }
  }
  return *best;
}

inline Configuration brute_force_best(const TemperatureField& field, const TegParams& teg,
                                      const ChargerParams& charger,
                                      const ReconfigParams& params) {
  const auto emfs = module_emfs(field, teg);
  return brute_force_best_detailed(emfs, teg, charger, params).config;
}

// ---------------------------------------------------------------------------
// DNOR

struct SwitchDecision {
  Configuration chosen;
  Configuration candidate;
  bool switched = false;
  double e_old = 0.0;       // [J] predicted energy of the old configuration
  double e_new = 0.0;       // [J] predicted energy of the candidate
  double e_overhead = 0.0;  // [J] estimated cost of switching
  std::size_t flips = 0;    // switches toggled if the candidate is adopted
};

/// Switch rule: adopt the candidate iff E_old <= E_new - E_overhead.
/// Ties go to switching.
inline bool should_switch(double e_old, double e_new, double e_overhead) {
  return e_old <= e_new - e_overhead;
}

/// Energy [J] of `config` over a sequence of fields spaced `time_step` apart.
inline double predicted_energy(const Configuration& config,
                               std::span<const TemperatureField> fields,
                               const ControllerModel& model) {
  double e = 0.0;
  for (const auto& f : fields) {
    const auto emfs = module_emfs(f, model.teg);
    e += mpp_score(config, emfs, model.teg, model.charger, model.reconfig.objective) *
         model.time_step;
  }
  return e;
}

/// Gate a fresh INOR candidate against the configuration already in place.
/// Energies cover the current second (actual field) plus the predictor's
/// t_p forecast seconds. The candidate is adopted iff
/// E_old <= E_new - E_overhead. Without an old configuration the candidate is
/// adopted unconditionally.
inline SwitchDecision decide_switch(double now, const TemperatureField& field,
                                    const Configuration& candidate,
                                    const std::optional<Configuration>& old_config,
                                    const TemperaturePredictor& predictor,
                                    const ControllerModel& model,
                                    std::optional<double> measured_compute = std::nullopt) {
  std::vector<TemperatureField> window;
  window.reserve(predictor.horizon() + 1);
  window.push_back(field);
  for (auto& f : predictor.predict(now)) window.push_back(std::move(f));

  SwitchDecision d;
  d.candidate = candidate;
  d.e_new = predicted_energy(candidate, window, model);

  if (!old_config) {
    d.flips = bootstrap_flip_count(field.size());
    d.e_overhead = model.overhead.energy(0.0, d.flips, measured_compute);
    d.chosen = candidate;
    d.switched = true;
    return d;
  }

  d.e_old = predicted_energy(*old_config, window, model);
  d.flips = switch_flip_count(*old_config, candidate);
  const auto emfs = module_emfs(field, model.teg);
  const double current_power =
      mpp_score(*old_config, emfs, model.teg, model.charger, model.reconfig.objective);
  d.e_overhead = model.overhead.energy(current_power, d.flips, measured_compute);

  if (candidate == *old_config) {
    d.chosen = *old_config;
    d.switched = false;
  } else if (should_switch(d.e_old, d.e_new, d.e_overhead)) {
    d.chosen = candidate;
    d.switched = true;
  } else {
    d.chosen = *old_config;
    d.switched = false;
  }
  return d;
}

inline SwitchDecision dnor_step(double now, const TemperatureField& field,
                                const std::optional<Configuration>& old_config,
                                const TemperaturePredictor& predictor,
                                const ControllerModel& model,
                                std::optional<double> measured_compute = std::nullopt) {
  const auto candidate = inor(field, model.teg, model.charger, model.reconfig);
  return decide_switch(now, field, candidate, old_config, predictor, model, measured_compute);
}

inline std::string_view to_string(TieBreak t) {
  return t == TieBreak::kSmallerBoundary ? "smaller" : "larger";
}

inline std::string_view to_string(Objective o) {
  return o == Objective::kBatterySide ? "battery" : "array";
}

}  // namespace tegrec
