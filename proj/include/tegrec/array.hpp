#pragma once

// Reconfigurable TEG array: a series chain of parallel groups built from
// contiguous runs of modules.
//
// Between modules i and i+1 sit three switches: S_S,i (series) and
// S_PT,i / S_PB,i (parallel, top and bottom). Exactly one pattern is closed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tegrec/error.hpp"
#include "tegrec/trace.hpp"

namespace tegrec {

/// Contiguous partition of N modules into n groups. Boundaries are the
/// 1-indexed serial numbers of each group's first module: g_1 = 1 < g_2 < ... <= N.
class Configuration {
 public:
  Configuration() = default;

  Configuration(std::size_t n_modules, std::vector<std::size_t> boundaries)
      : n_modules_(n_modules), boundaries_(std::move(boundaries)) {
    if (n_modules_ == 0) throw DomainError("Configuration: n_modules must be >= 1");
    if (boundaries_.empty() || boundaries_.front() != 1)
      throw DomainError("Configuration: first boundary must be 1");
    for (std::size_t j = 1; j < boundaries_.size(); ++j)
      if (boundaries_[j] <= boundaries_[j - 1])
        throw DomainError("Configuration: boundaries must be strictly increasing");
    if (boundaries_.back() > n_modules_)
      throw DomainError("Configuration: boundary exceeds n_modules");
  }

  /// n_groups groups of near-equal size (larger groups first).
  static Configuration uniform(std::size_t n_modules, std::size_t n_groups) {
    if (n_groups == 0 || n_groups > n_modules)
      throw DomainError("Configuration::uniform: need 1 <= n_groups <= n_modules");
    std::vector<std::size_t> b;
    b.reserve(n_groups);
    std::size_t start = 1;
    for (std::size_t j = 0; j < n_groups; ++j) {
      b.push_back(start);
      start += n_modules / n_groups + (j < n_modules % n_groups ? 1 : 0);
    }
    return Configuration(n_modules, std::move(b));
  }

  /// Parses "1,3,7".
  static Configuration parse(std::string_view text, std::size_t n_modules) {
    std::vector<std::size_t> b;
    for (auto field : detail::split_csv(text)) {
      field = detail::trim(field);
      std::size_t v = 0;
      std::size_t used = 0;
      try {
        v = std::stoul(std::string(field), &used);
      } catch (const std::exception&) {
        throw DomainError("Configuration::parse: bad boundary '" + std::string(field) + "'");
      }
      if (used != field.size() || field.front() == '-')
        throw DomainError("Configuration::parse: bad boundary '" + std::string(field) + "'");
      b.push_back(v);
    }
    return Configuration(n_modules, std::move(b));
  }

  std::size_t n_modules() const noexcept { return n_modules_; }
  std::size_t n_groups() const noexcept { return boundaries_.size(); }
  const std::vector<std::size_t>& boundaries() const noexcept { return boundaries_; }

  /// 0-based half-open module range [begin, end) of group j (0-based).
  std::size_t group_begin(std::size_t j) const { return boundaries_[j] - 1; }
  std::size_t group_end(std::size_t j) const {
    return j + 1 < boundaries_.size() ? boundaries_[j + 1] - 1 : n_modules_;
  }
  std::size_t group_size(std::size_t j) const { return group_end(j) - group_begin(j); }

  std::string to_string() const {
    std::string s;
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
      if (j) s += ',';
      s += std::to_string(boundaries_[j]);
    }
    return s;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t n_modules_ = 0;
  std::vector<std::size_t> boundaries_;
};

// ---------------------------------------------------------------------------
// Switch fabric

enum class GapState { kSeries, kParallel };

struct SwitchTriple {
  bool series_closed = false;           // S_S,i
  bool parallel_top_closed = false;     // S_PT,i
  bool parallel_bottom_closed = false;  // S_PB,i

  friend bool operator==(const SwitchTriple&, const SwitchTriple&) = default;
};

inline constexpr std::size_t kSwitchesPerGap = 3;

inline SwitchTriple expand(GapState s) {
  return s == GapState::kSeries ? SwitchTriple{true, false, false}
                                : SwitchTriple{false, true, true};
}

/// Gap i (0-based, between modules i and i+1) is SERIES iff module i+1 starts a group.
inline std::vector<GapState> switch_states(const Configuration& config) {
  const std::size_t n = config.n_modules();
  std::vector<GapState> gaps(n > 0 ? n - 1 : 0, GapState::kParallel);
  for (std::size_t j = 1; j < config.n_groups(); ++j)
    gaps[config.boundaries()[j] - 2] = GapState::kSeries;
  return gaps;
}

/// Inverse of switch_states.
inline Configuration configuration_from_switch_states(std::span<const GapState> gaps) {
  std::vector<std::size_t> b{1};
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] == GapState::kSeries) b.push_back(i + 2);
  return Configuration(gaps.size() + 1, std::move(b));
}

/// Number of individual switches toggled going from `from` to `to`.
inline std::size_t switch_flip_count(const Configuration& from, const Configuration& to) {
  if (from.n_modules() != to.n_modules())
    throw DomainError("switch_flip_count: configurations differ in size");
  const auto a = switch_states(from);
  const auto b = switch_states(to);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
  return changed * kSwitchesPerGap;
}

/// Switches driven when the fabric is set up from scratch (every gap).
inline std::size_t bootstrap_flip_count(std::size_t n_modules) {
  return n_modules > 0 ? (n_modules - 1) * kSwitchesPerGap : 0;
}

// ---------------------------------------------------------------------------
// Electrical solve

struct ArrayOperatingPoint {
  double current = 0.0;                 // series current through every group [A]
  std::vector<double> group_voltages;   // [V]
  double total_voltage = 0.0;           // [V]
  double total_power = 0.0;             // [W]
  std::vector<double> module_currents;  // [A], may be negative
};

namespace detail {

inline void check_emfs(const Configuration& config, std::span<const double> emfs,
                       double r_teg) {
  if (emfs.size() != config.n_modules())
    throw DomainError("array: EMF vector length differs from n_modules");
  if (!(r_teg > 0.0)) throw DomainError("array: r_teg must be > 0");
  for (double e : emfs)
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("array: EMFs must be finite and >= 0");
}

// P(I) = I * (A - I * B) for the whole configuration.
struct PowerQuadratic {
  double a = 0.0;  // sum_j S_j / m_j
  double b = 0.0;  // r_teg * sum_j 1 / m_j
};

inline PowerQuadratic power_quadratic(const Configuration& config, std::span<const double> emfs,
                                      double r_teg) {
  PowerQuadratic q;
  for (std::size_t j = 0; j < config.n_groups(); ++j) {
    double s = 0.0;
    for (std::size_t i = config.group_begin(j); i < config.group_end(j); ++i) s += emfs[i];
    const double m = static_cast<double>(config.group_size(j));
    q.a += s / m;
    q.b += 1.0 / m;
  }
  q.b *= r_teg;
  return q;
}

}  // namespace detail

/// Operating point with the array driven at series current `current`.
/// Inside group j (m_j modules, EMF sum S_j) all members share
/// V_j = (S_j - I * r) / m_j and module k sources (E_k - V_j) / r.
inline ArrayOperatingPoint solve_at_current(const Configuration& config,
                                            std::span<const double> emfs, double r_teg,
                                            double current) {
  detail::check_emfs(config, emfs, r_teg);
  if (!(current >= 0.0)) throw DomainError("solve_at_current: current must be >= 0");

  ArrayOperatingPoint op;
  op.current = current;
  op.group_voltages.resize(config.n_groups());
  op.module_currents.resize(config.n_modules());
  for (std::size_t j = 0; j < config.n_groups(); ++j) {
    const std::size_t lo = config.group_begin(j);
    const std::size_t hi = config.group_end(j);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += emfs[i];
    const double v = (s - current * r_teg) / static_cast<double>(hi - lo);
    op.group_voltages[j] = v;
    for (std::size_t i = lo; i < hi; ++i) op.module_currents[i] = (emfs[i] - v) / r_teg;
    op.total_voltage += v;
  }
  op.total_power = current * op.total_voltage;
  return op;
}

/// Power delivered at series current I, without building the full point.
inline double power_at_current(const Configuration& config, std::span<const double> emfs,
                               double r_teg, double current) {
  detail::check_emfs(config, emfs, r_teg);
  const auto q = detail::power_quadratic(config, emfs, r_teg);
  return current * (q.a - current * q.b);
}

/// Current and power of the configuration's maximum power point:
/// I* = A / 2B, P* = A^2 / 4B, total voltage A / 2.
struct MppSummary {
  double current = 0.0;
  double voltage = 0.0;
  double power = 0.0;
};

inline MppSummary configuration_mpp_summary(const Configuration& config,
                                            std::span<const double> emfs, double r_teg) {
  detail::check_emfs(config, emfs, r_teg);
  const auto q = detail::power_quadratic(config, emfs, r_teg);
  const double i = q.a / (2.0 * q.b);
  return {i, 0.5 * q.a, q.a * q.a / (4.0 * q.b)};
}

inline ArrayOperatingPoint configuration_mpp(const Configuration& config,
                                             std::span<const double> emfs, double r_teg) {
  const auto s = configuration_mpp_summary(config, emfs, r_teg);
  return solve_at_current(config, emfs, r_teg, s.current);
}

struct MpptResult {
  ArrayOperatingPoint point;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Perturb-and-observe on the array current, starting from open circuit.
/// Each iteration tries I + step then I - step and moves to whichever
/// improves power; it stops when neither does.
inline MpptResult numeric_mppt(const Configuration& config, std::span<const double> emfs,
                               double r_teg, double step, std::size_t max_iters = 100000) {
  if (!(step > 0.0)) throw DomainError("numeric_mppt: step must be > 0");
  auto observe = [&](double i) { return solve_at_current(config, emfs, r_teg, i).total_power; };

  double current = 0.0;
  double power = observe(current);
  MpptResult res;
  for (; res.iterations < max_iters; ++res.iterations) {
    const double up = observe(current + step);
    if (up > power) {
      current += step;
      power = up;
      continue;
    }
    if (current - step >= 0.0) {
      const double down = observe(current - step);
      if (down > power) {
        current -= step;
        power = down;
        continue;
      }
    }
    res.converged = true;
    break;
  }
  res.point = solve_at_current(config, emfs, r_teg, current);
  return res;
}

/// Worst-case power shortfall of numeric_mppt with step `step`: P* - P(I* +- step) = B * step^2.
inline double mppt_step_bound(const Configuration& config, std::span<const double> emfs,
                              double r_teg, double step) {
  detail::check_emfs(config, emfs, r_teg);
  return detail::power_quadratic(config, emfs, r_teg).b * step * step;
}

}  // namespace tegrec
