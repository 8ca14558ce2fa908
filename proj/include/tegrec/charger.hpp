#pragma once

// DC-DC charger between the array and a 13.8 V lead-acid battery.
// Conversion efficiency peaks when the input voltage matches the charging
// voltage and falls off linearly (down to a floor) as it deviates.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tegrec/array.hpp"
#include "tegrec/error.hpp"
#include "tegrec/trace.hpp"

namespace tegrec {

/// Measured efficiency curve, CSV `v_in,efficiency`, linearly interpolated
/// and clamped at the ends.
class EfficiencyTable {
 public:
  EfficiencyTable() = default;

  explicit EfficiencyTable(std::vector<std::pair<double, double>> points)
      : points_(std::move(points)) {
    if (points_.size() < 2) throw DomainError("EfficiencyTable: need at least 2 points");
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (k > 0 && !(points_[k].first > points_[k - 1].first))
        throw DomainError("EfficiencyTable: v_in must be strictly increasing");
      if (!(points_[k].second >= 0.0 && points_[k].second <= 1.0))
        throw DomainError("EfficiencyTable: efficiency must be in [0, 1]");
    }
  }

  double operator()(double v) const {
    if (v <= points_.front().first) return points_.front().second;
    if (v >= points_.back().first) return points_.back().second;
    auto hi = std::lower_bound(points_.begin(), points_.end(), v,
                               [](const auto& p, double x) { return p.first < x; });
    auto lo = std::prev(hi);
    const double w = (v - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

  double max_efficiency() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, p.second);
    return m;
  }

  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

inline EfficiencyTable load_efficiency_table(std::istream& in,
                                             const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!have_header) {
      if (body != "v_in,efficiency") throw ParseError(where + ": expected header 'v_in,efficiency'");
      have_header = true;
      continue;
    }
    const auto f = detail::split_csv(body);
    if (f.size() != 2) throw ParseError(where + ": expected 2 columns");
    pts.emplace_back(detail::parse_double(f[0], where), detail::parse_double(f[1], where));
  }
  try {
    return EfficiencyTable(std::move(pts));
  } catch (const DomainError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline EfficiencyTable load_efficiency_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return load_efficiency_table(in, path);
}

struct ChargerParams {
  double target_voltage = 13.8;   // battery charging voltage [V]
  double peak_efficiency = 0.95;
  double droop = 0.02;            // efficiency lost per volt of |v_in - target|
  double floor_efficiency = 0.5;
  double v_min = 4.0;             // admissible input range [V]
  double v_max = 40.0;
  std::optional<EfficiencyTable> table;  // replaces the parametric curve when set

  void validate() const {
    if (!(floor_efficiency >= 0.0 && floor_efficiency <= peak_efficiency &&
          peak_efficiency <= 1.0))
      throw DomainError("charger: need 0 <= floor_efficiency <= peak_efficiency <= 1");
    if (!(droop >= 0.0)) throw DomainError("charger: droop must be >= 0");
    if (!(v_min < target_voltage && target_voltage < v_max))
      throw DomainError("charger: need v_min < target_voltage < v_max");
  }

  /// Upper bound of efficiency() over all inputs.
  double best_efficiency() const { return table ? table->max_efficiency() : peak_efficiency; }
};

inline double efficiency(const ChargerParams& p, double v_in) {
  if (!(v_in >= 0.0)) throw DomainError("efficiency: v_in must be >= 0");
  if (p.table) return (*p.table)(v_in);
  return std::max(p.floor_efficiency, p.peak_efficiency - p.droop * std::abs(v_in - p.target_voltage));
}

/// Battery-side power for an array delivering `power` at `voltage`.
inline double battery_power(const ChargerParams& p, double voltage, double power) {
  if (!(voltage >= 0.0)) throw DomainError("battery_power: array voltage must be >= 0");
  if (power <= 0.0 || voltage < p.v_min || voltage > p.v_max) return 0.0;
  return efficiency(p, voltage) * power;
}

inline double battery_power(const ChargerParams& p, const ArrayOperatingPoint& point) {
  return battery_power(p, point.total_voltage, point.total_power);
}

struct GroupCountRange {
  std::size_t n_min = 1;
  std::size_t n_max = 1;
};

/// Group counts n whose series voltage n * V_typ lands inside [v_min, v_max].
inline GroupCountRange derive_n_range(const ChargerParams& p, double typical_module_mpp_voltage) {
  if (!(typical_module_mpp_voltage > 0.0))
    throw DomainError("derive_n_range: typical module voltage must be > 0");
  const double lo = std::ceil(p.v_min / typical_module_mpp_voltage - 1e-12);
  const double hi = std::floor(p.v_max / typical_module_mpp_voltage + 1e-12);
  const auto n_min = static_cast<std::size_t>(std::max(1.0, lo));
  if (hi < 1.0 || static_cast<double>(n_min) > hi)
    throw ConfigError("charger",
                      "no group count puts the array voltage inside [v_min, v_max]; widen the "
                      "charger input range");
  return {n_min, static_cast<std::size_t>(hi)};
}

}  // namespace tegrec
