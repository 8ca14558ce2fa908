#pragma once

// Drive traces: CSV ingestion, linear interpolation, and seeded synthetic
// generators.
//
// CSV format (header required, '.' decimal separator):
//   time_s,coolant_inlet_C,ambient_C

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tegrec/error.hpp"
#include "tegrec/thermal.hpp"

namespace tegrec {

inline constexpr std::string_view kTraceHeader = "time_s,coolant_inlet_C,ambient_C";

/// Validated, time-ordered sequence of trace samples.
class Trace {
 public:
  Trace() = default;

  explicit Trace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) check_sample(i);
  }

  const std::vector<TraceSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const TraceSample& operator[](std::size_t i) const { return samples_[i]; }

  double start_time() const { return samples_.front().time; }
  double end_time() const { return samples_.back().time; }

  /// Linearly interpolated sample at time t. Times outside the trace are
  /// clamped to the first/last sample.
  TraceSample at(double t) const {
    if (samples_.empty()) throw DomainError("Trace::at: empty trace");
    if (t <= samples_.front().time) return with_time(samples_.front(), t);
    if (t >= samples_.back().time) return with_time(samples_.back(), t);
    auto hi = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const TraceSample& s, double v) { return s.time < v; });
    if (hi->time == t) return *hi;
    auto lo = std::prev(hi);
    const double w = (t - lo->time) / (hi->time - lo->time);
    return TraceSample{t, lo->coolant_inlet_temp + w * (hi->coolant_inlet_temp - lo->coolant_inlet_temp),
                       lo->ambient_temp + w * (hi->ambient_temp - lo->ambient_temp)};
  }

 private:
  static TraceSample with_time(TraceSample s, double t) {
    s.time = t;
    return s;
  }

  void check_sample(std::size_t i) const {
    const auto& s = samples_[i];
    const std::string row = "trace sample " + std::to_string(i);
    if (!std::isfinite(s.time) || !std::isfinite(s.coolant_inlet_temp) ||
        !std::isfinite(s.ambient_temp))
      throw ParseError(row + ": non-finite value");
    if (s.time < 0.0) throw ParseError(row + ": negative time");
    if (i > 0 && !(s.time > samples_[i - 1].time))
      throw ParseError(row + ": time not strictly increasing");
    if (s.coolant_inlet_temp < s.ambient_temp)
      throw ParseError(row + ": coolant inlet below ambient");
  }

  std::vector<TraceSample> samples_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, const std::string& where) {
  field = trim(field);
  if (field.empty()) throw ParseError(where + ": empty field");
  std::string buf(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number '" + buf + "'");
  }
  if (used != buf.size()) throw ParseError(where + ": not a number '" + buf + "'");
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

/// Parses a trace CSV. `source` names the input in error messages.
inline Trace load_trace(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<TraceSample> samples;

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!have_header) {
      std::string_view h = body;
      if (h.size() >= 3 && static_cast<unsigned char>(h[0]) == 0xEF) h.remove_prefix(3);  // BOM
      if (h != kTraceHeader)
        throw ParseError(where + ": expected header '" + std::string(kTraceHeader) + "'");
      have_header = true;
      continue;
    }
    const auto fields = detail::split_csv(body);
    if (fields.size() != 3)
      throw ParseError(where + ": expected 3 columns, got " + std::to_string(fields.size()));
    TraceSample s{detail::parse_double(fields[0], where), detail::parse_double(fields[1], where),
                  detail::parse_double(fields[2], where)};
    if (s.time < 0.0) throw ParseError(where + ": negative time");
    if (!samples.empty() && !(s.time > samples.back().time))
      throw ParseError(where + ": time not strictly increasing");
    if (s.coolant_inlet_temp < s.ambient_temp)
      throw ParseError(where + ": coolant inlet below ambient");
    samples.push_back(s);
  }
  if (!have_header) throw ParseError(source + ": missing header");
  if (samples.empty()) throw ParseError(source + ": no samples");
  return Trace(std::move(samples));
}

inline Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return load_trace(in, path);
}

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  out.precision(10);
  for (const auto& s : trace.samples())
    out << s.time << ',' << s.coolant_inlet_temp << ',' << s.ambient_temp << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic traces

enum class SynthKind { kConstant, kRamp, kSinusoid, kRandomWalk };

struct SynthSpec {
  SynthKind kind = SynthKind::kConstant;
  std::size_t duration_s = 800;
  double inlet_C = 90.0;
  double ambient_C = 30.0;
  double ramp_C = 10.0;          // total inlet change over the trace (kRamp)
  double amplitude_C = 5.0;      // kSinusoid
  double period_s = 200.0;       // kSinusoid
  double walk_sigma_C = 0.05;    // per-second inlet step std-dev (kRandomWalk)
  double walk_reversion = 0.01;  // pull toward inlet_C per second (kRandomWalk)
  double min_delta_C = 1.0;      // inlet is kept at least this far above ambient
  std::uint64_t seed = 1;

  void validate() const {
    if (duration_s < 1) throw DomainError("synth: duration_s must be >= 1");
    if (!(inlet_C >= ambient_C)) throw DomainError("synth: inlet_C must be >= ambient_C");
    if (kind == SynthKind::kSinusoid && !(period_s > 0.0))
      throw DomainError("synth: period_s must be > 0");
    if (!(walk_sigma_C >= 0.0)) throw DomainError("synth: walk_sigma_C must be >= 0");
    if (!(walk_reversion >= 0.0 && walk_reversion <= 1.0))
      throw DomainError("synth: walk_reversion must be in [0, 1]");
    if (!(min_delta_C >= 0.0)) throw DomainError("synth: min_delta_C must be >= 0");
  }
};

/// One sample per second for `duration_s` seconds (times 0 .. duration_s-1).
/// Deterministic for a given spec, seed included.
inline Trace synth_trace(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> step(0.0, 1.0);

  std::vector<TraceSample> samples;
  samples.reserve(spec.duration_s);
  double walk = spec.inlet_C;
  const double floor = spec.ambient_C + spec.min_delta_C;
  for (std::size_t k = 0; k < spec.duration_s; ++k) {
    const double t = static_cast<double>(k);
    double inlet = spec.inlet_C;
    switch (spec.kind) {
      case SynthKind::kConstant:
        break;
      case SynthKind::kRamp:
        inlet += spec.duration_s > 1 ? spec.ramp_C * t / static_cast<double>(spec.duration_s - 1)
                                     : 0.0;
        break;
      case SynthKind::kSinusoid:
        inlet += spec.amplitude_C * std::sin(2.0 * std::numbers::pi * t / spec.period_s);
        break;
      case SynthKind::kRandomWalk:
        if (k > 0) {
          walk += spec.walk_reversion * (spec.inlet_C - walk) + spec.walk_sigma_C * step(rng);
          walk = std::max(walk, floor);
        }
        inlet = walk;
        break;
    }
    inlet = std::max(inlet, std::max(floor, spec.ambient_C));
    samples.push_back(TraceSample{t, inlet, spec.ambient_C});
  }
  return Trace(std::move(samples));
}

inline SynthKind parse_synth_kind(std::string_view name) {
  if (name == "constant") return SynthKind::kConstant;
  if (name == "ramp") return SynthKind::kRamp;
  if (name == "sinusoid") return SynthKind::kSinusoid;
  if (name == "random-walk" || name == "random_walk") return SynthKind::kRandomWalk;
  throw DomainError("unknown synthetic trace kind '" + std::string(name) + "'");
}

inline std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kConstant: return "constant";
    case SynthKind::kRamp: return "ramp";
    case SynthKind::kSinusoid: return "sinusoid";
    case SynthKind::kRandomWalk: return "random-walk";
  }
  return "?";
}

}  // namespace tegrec
