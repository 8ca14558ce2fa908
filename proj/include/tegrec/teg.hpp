#pragma once

// Linear thermoelectric module model: a Thevenin source with
// EMF = alpha * dT * N_cpl and internal resistance R_teg.

#include <cmath>
#include <cstddef>
#include <vector>

#include "tegrec/error.hpp"

namespace tegrec {

struct TegParams {
  double seebeck_per_couple = 0.0002;  // alpha [V/K]
  double n_couples = 199;              // N_cpl
  double internal_resistance = 1.5;    // R_teg [ohm]

  void validate() const {
    if (!(seebeck_per_couple > 0.0)) throw DomainError("teg: seebeck_per_couple must be > 0");
    if (!(n_couples > 0.0)) throw DomainError("teg: n_couples must be > 0");
    if (!(internal_resistance > 0.0)) throw DomainError("teg: internal_resistance must be > 0");
  }
};

struct ModuleOperatingPoint {
  double voltage = 0.0;
  double current = 0.0;
  double power = 0.0;
};

inline double emf(const TegParams& p, double delta_t) {
  if (!(delta_t >= 0.0)) throw DomainError("emf: delta_t must be >= 0");
  return p.seebeck_per_couple * delta_t * p.n_couples;
}

/// Module driving a resistive load.
inline ModuleOperatingPoint operating_point(const TegParams& p, double delta_t,
                                            double load_resistance) {
  if (!(load_resistance >= 0.0)) throw DomainError("operating_point: load must be >= 0");
  const double e = emf(p, delta_t);
  const double i = e / (p.internal_resistance + load_resistance);
  const double v = i * load_resistance;
  return {v, i, v * i};
}

/// Matched-load maximum: R_Load = R_teg.
inline ModuleOperatingPoint module_mpp(const TegParams& p, double delta_t) {
  const double e = emf(p, delta_t);
  const double v = 0.5 * e;
  const double i = e / (2.0 * p.internal_resistance);
  return {v, i, v * i};
}

/// MPP current straight from an EMF, used in the inner loops of the array code.
inline double mpp_current_from_emf(const TegParams& p, double e) {
  return e / (2.0 * p.internal_resistance);
}

/// Points evenly spaced in voltage from short circuit (V=0) to open circuit (V=E).
inline std::vector<ModuleOperatingPoint> iv_curve(const TegParams& p, double delta_t,
                                                  std::size_t n_points) {
  if (n_points < 2) throw DomainError("iv_curve: n_points must be >= 2");
  const double e = emf(p, delta_t);
  std::vector<ModuleOperatingPoint> out;
  out.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double v = (k + 1 == n_points) ? e : e * static_cast<double>(k) / (n_points - 1);
    const double i = (e - v) / p.internal_resistance;
    out.push_back({v, i, v * i});
  }
  return out;
}

}  // namespace tegrec
