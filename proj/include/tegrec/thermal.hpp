#pragma once

// Radiator surface temperature profile.
//
// The coolant enters the radiator at T_h,i and cools exponentially toward the
// cold-side temperature T_c,a along the flow path:
//
//   T(d) = (T_h,i - T_c,a) * exp(-(K/C_c) * d) + T_c,a
//
// Modules are numbered from the radiator entrance, so hot-side temperatures
// are non-increasing with module index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "tegrec/error.hpp"

namespace tegrec {

enum class AmbientMode {
  kPerSample,  // T_c,a read from each trace sample
  kFixed,      // T_c,a held at ThermalParams::fixed_ambient
};

struct ThermalParams {
  double k_over_cc = 0.9;        // K / C_c [1/m]
  double radiator_length = 1.0;  // [m]
  AmbientMode ambient_mode = AmbientMode::kPerSample;
  double fixed_ambient = 30.0;  // [degC], used in kFixed mode

  // Optional time-varying K/C_c (e.g. driven by coolant flow). Empty means
  // k_over_cc is used at every time.
  std::function<double(double time)> k_over_cc_schedule;

  void validate() const {
    if (!(k_over_cc > 0.0) || !std::isfinite(k_over_cc))
      throw DomainError("thermal: k_over_cc must be > 0");
    if (!(radiator_length > 0.0) || !std::isfinite(radiator_length))
      throw DomainError("thermal: radiator_length must be > 0");
  }

  double k_over_cc_at(double time) const {
    if (!k_over_cc_schedule) return k_over_cc;
    const double k = k_over_cc_schedule(time);
    if (!(k > 0.0)) throw DomainError("thermal: scheduled k_over_cc must be > 0");
    return k;
  }
};

struct TraceSample {
  double time = 0.0;                // [s] from trace start
  double coolant_inlet_temp = 0.0;  // T_h,i [degC]
  double ambient_temp = 0.0;        // T_c,a [degC]
};

struct TemperatureField {
  double time = 0.0;
  std::vector<double> hot_side_temps;  // [degC], entry i is module i
  double ambient_temp = 0.0;

  std::size_t size() const noexcept { return hot_side_temps.size(); }

  /// Temperature difference across module i.
  double delta_t(std::size_t i) const {
    return std::max(0.0, hot_side_temps[i] - ambient_temp);
  }
};

namespace detail {

inline double temperature_profile(double k, double inlet, double ambient, double d) {
  if (!(d >= 0.0)) throw DomainError("temperature_at: distance must be >= 0");
  if (!(inlet >= ambient)) throw DomainError("temperature_at: inlet must be >= ambient");
  const double t = (inlet - ambient) * std::exp(-k * d) + ambient;
  return std::clamp(t, ambient, inlet);
}

}  // namespace detail

/// Hot-side temperature at distance d [m] from the radiator entrance.
inline double temperature_at(const ThermalParams& params, double inlet, double ambient,
                             double d) {
  params.validate();
  return detail::temperature_profile(params.k_over_cc, inlet, ambient, d);
}

/// Module i (0-based here) sits at the midpoint of its segment,
/// d_i = (i + 0.5) * L / N.
inline TemperatureField field_from_sample(const ThermalParams& params, const TraceSample& sample,
                                          std::size_t n_modules) {
  params.validate();
  if (n_modules == 0) throw DomainError("field_from_sample: n_modules must be >= 1");

  const double ambient = params.ambient_mode == AmbientMode::kFixed ? params.fixed_ambient
                                                                    : sample.ambient_temp;
  const double inlet = sample.coolant_inlet_temp;
  const double k = params.k_over_cc_at(sample.time);
  const double pitch = params.radiator_length / static_cast<double>(n_modules);

  TemperatureField field;
  field.time = sample.time;
  field.ambient_temp = ambient;
  field.hot_side_temps.resize(n_modules);
  for (std::size_t i = 0; i < n_modules; ++i) {
    const double d = (static_cast<double>(i) + 0.5) * pitch;
    field.hot_side_temps[i] = detail::temperature_profile(k, inlet, ambient, d);
  }
  return field;
}

/// Field with every module at the same hot-side temperature.
inline TemperatureField uniform_field(std::size_t n_modules, double hot_side, double ambient,
                                      double time = 0.0) {
  if (hot_side < ambient) throw DomainError("uniform_field: hot side below ambient");
  return TemperatureField{time, std::vector<double>(n_modules, hot_side), ambient};
}

}  // namespace tegrec
