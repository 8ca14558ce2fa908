#pragma once

#include <cstddef>
#include <optional>

#include "tegrec/error.hpp"

namespace tegrec {

/// Cost of one reconfiguration. During the sensing, compute, switching and
/// MPPT-resettling delays the array delivers (approximately) nothing, so the
/// foregone energy is the delay sum times the power that would otherwise
/// have been delivered, plus a fixed actuation energy per toggled switch.
struct OverheadParams {
  double sensing_delay = 0.005;      // [s]
  double compute_delay = 0.003;      // [s]
  double reconfig_delay = 0.005;     // [s]
  double mppt_settle_delay = 0.02;   // [s]
  double per_switch_energy = 1e-4;   // [J] per toggled switch
  bool live_compute_delay = false;   // replace compute_delay with measured runtime

  void validate() const {
    if (!(sensing_delay >= 0.0 && compute_delay >= 0.0 && reconfig_delay >= 0.0 &&
          mppt_settle_delay >= 0.0 && per_switch_energy >= 0.0))
      throw DomainError("overhead: all delays and per_switch_energy must be >= 0");
  }

  double total_delay(std::optional<double> measured_compute = std::nullopt) const {
    const double compute =
        (live_compute_delay && measured_compute) ? *measured_compute : compute_delay;
    return sensing_delay + compute + reconfig_delay + mppt_settle_delay;
  }

  /// Energy [J] lost by a switch event toggling `flips` switches while the
  /// array would otherwise deliver `power` [W].
  double energy(double power, std::size_t flips,
                std::optional<double> measured_compute = std::nullopt) const {
    return total_delay(measured_compute) * power + per_switch_energy * static_cast<double>(flips);
  }
};

}  // namespace tegrec
