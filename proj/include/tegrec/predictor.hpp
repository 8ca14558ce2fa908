#pragma once

// Temperature forecasting for the reconfiguration controller.
//
// MlrPredictor fits one direct multiple-linear-regression model per horizon k:
//
//   T_i(t + k) ~ beta0 + sum_{l=0}^{w-1} beta_{l+1} * T_i(t - l)
//
// on a sliding history of temperature fields. With pooling on, all modules
// share one coefficient vector per horizon.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "tegrec/error.hpp"
#include "tegrec/thermal.hpp"

namespace tegrec {

// ---------------------------------------------------------------------------
// Accuracy metric

struct MapeReport {
  double percent = 0.0;        // mean absolute percentage error [%]
  std::size_t samples = 0;
  double worst_percent = 0.0;  // largest single absolute percentage error [%]
};

/// (100 / n) * sum |A - F| / |A|, in percent.
inline MapeReport mape(std::span<const double> actual, std::span<const double> forecast) {
  if (actual.size() != forecast.size()) throw DomainError("mape: length mismatch");
  if (actual.empty()) throw DomainError("mape: need at least one sample");
  MapeReport r;
  r.samples = actual.size();
  double sum = 0.0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (actual[t] == 0.0) throw DomainError("mape: actual value is zero");
    const double ape = 100.0 * std::abs((actual[t] - forecast[t]) / actual[t]);
    sum += ape;
    r.worst_percent = std::max(r.worst_percent, ape);
  }
  r.percent = sum / static_cast<double>(actual.size());
  return r;
}

// ---------------------------------------------------------------------------
// Predictor interface

class TemperaturePredictor {
 public:
  virtual ~TemperaturePredictor() = default;

  virtual void observe(const TemperatureField& field) = 0;

  /// Forecast fields for now+1 .. now+horizon().
  virtual std::vector<TemperatureField> predict(double now) const = 0;

  virtual std::size_t horizon() const = 0;
};

struct PredictorConfig {
  std::size_t window = 5;    // lags per feature row (w)
  std::size_t horizon = 2;   // seconds ahead (t_p)
  std::size_t history = 60;  // fields retained for training (H)
  bool pooling = true;
  double ridge = 1e-8;
  std::size_t refit_interval = 0;  // observations between refits; 0 means horizon + 1
  double time_step = 1.0;          // spacing of observed fields [s]

  void validate() const {
    if (window < 1) throw DomainError("predictor: window must be >= 1");
    if (horizon < 1) throw DomainError("predictor: horizon must be >= 1");
    if (history < window + horizon + 1)
      throw DomainError("predictor: history must be >= window + horizon + 1");
    if (!(ridge >= 0.0)) throw DomainError("predictor: ridge must be >= 0");
    if (!(time_step > 0.0)) throw DomainError("predictor: time_step must be > 0");
  }

  std::size_t effective_refit_interval() const {
    return refit_interval == 0 ? horizon + 1 : refit_interval;
  }
};

/// Least squares with an unpenalised intercept. Rows are centred before
/// forming the normal equations. The ridge term keeps the factorisation
/// defined when lag columns are collinear (constant traces); a few steps of
/// iterative refinement against the unpenalised system then remove its bias
/// along well-determined directions, while null directions stay at zero.
/// Returns [beta0, beta1..betaw].
class RidgeAccumulator {
 public:
  explicit RidgeAccumulator(std::size_t n_features)
      : n_(n_features), sum_x_(Eigen::VectorXd::Zero(n_features)) {}

  void add(std::span<const double> x, double y) {
    rows_x_.insert(rows_x_.end(), x.begin(), x.end());
    rows_y_.push_back(y);
    for (std::size_t c = 0; c < n_; ++c) sum_x_[c] += x[c];
    sum_y_ += y;
  }

  std::size_t rows() const noexcept { return rows_y_.size(); }

  static constexpr int kRefineSteps = 3;

  Eigen::VectorXd solve(double ridge) const {
    const auto m = static_cast<double>(rows());
    const Eigen::VectorXd mean_x = sum_x_ / m;
    const double mean_y = sum_y_ / m;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_, n_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd xc(n_);
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t c = 0; c < n_; ++c) xc[c] = rows_x_[r * n_ + c] - mean_x[c];
      gram.selfadjointView<Eigen::Lower>().rankUpdate(xc);
      rhs += xc * (rows_y_[r] - mean_y);
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::MatrixXd damped = gram;
    damped.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    Eigen::VectorXd slopes = ldlt.solve(rhs);
    if (!slopes.allFinite()) {
      slopes = damped.completeOrthogonalDecomposition().solve(rhs);
    } else if (ridge > 0.0) {
      for (int k = 0; k < kRefineSteps; ++k) {
        const Eigen::VectorXd step = ldlt.solve(rhs - gram * slopes);
        if (!step.allFinite()) break;
        slopes += step;
      }
    }

    Eigen::VectorXd beta(n_ + 1);
    beta[0] = mean_y - slopes.dot(mean_x);
    beta.tail(n_) = slopes;
    return beta;
  }

 private:
  std::size_t n_;
  std::vector<double> rows_x_;
  std::vector<double> rows_y_;
  Eigen::VectorXd sum_x_;
  double sum_y_ = 0.0;
};

/// Sliding-window MLR forecaster.
class MlrPredictor final : public TemperaturePredictor {
 public:
  explicit MlrPredictor(PredictorConfig config) : config_(config) { config_.validate(); }

  const PredictorConfig& config() const noexcept { return config_; }
  std::size_t horizon() const override { return config_.horizon; }
  bool fitted() const noexcept { return fitted_; }
  std::size_t observed() const noexcept { return history_.size(); }

  /// Coefficient vectors indexed [horizon-1] when pooled, or
  /// [module * horizon + horizon-1] otherwise.
  const std::vector<Eigen::VectorXd>& coefficients() const noexcept { return coeffs_; }

  void observe(const TemperatureField& field) override {
    if (!history_.empty() && field.size() != history_.back().size())
      throw DomainError("MlrPredictor::observe: field size differs from history");
    history_.push_back(field);
    while (history_.size() > config_.history) history_.pop_front();
    ++since_fit_;
    if (has_enough_history() && (!fitted_ || since_fit_ >= config_.effective_refit_interval()))
      fit();
  }

  /// Fields needed before the first fit: window + 1 training rows per module
  /// at the longest horizon (as many rows as coefficients), capped by the
  /// retained history.
  std::size_t min_fields_to_fit() const {
    return std::min(2 * config_.window + config_.horizon, config_.history);
  }

  bool has_enough_history() const { return history_.size() >= min_fields_to_fit(); }

  /// Refits every horizon model on the retained history. Leaves the state
  /// unfitted if there is not yet one full training row.
  void fit() {
    if (!has_enough_history()) return;
    const std::size_t w = config_.window;
    const std::size_t n_mod = history_.back().size();
    const std::size_t tp = config_.horizon;
    std::vector<double> x(w);

    auto build = [&](RidgeAccumulator& acc, std::size_t k, std::size_t module) {
      for (std::size_t t = w - 1; t + k < history_.size(); ++t) {
        for (std::size_t l = 0; l < w; ++l) x[l] = history_[t - l].hot_side_temps[module];
        acc.add(x, history_[t + k].hot_side_temps[module]);
      }
    };

    std::vector<Eigen::VectorXd> coeffs;
    if (config_.pooling) {
      coeffs.reserve(tp);
      for (std::size_t k = 1; k <= tp; ++k) {
        RidgeAccumulator acc(w);
        for (std::size_t i = 0; i < n_mod; ++i) build(acc, k, i);
        coeffs.push_back(acc.solve(config_.ridge));
      }
    } else {
      coeffs.reserve(tp * n_mod);
      for (std::size_t i = 0; i < n_mod; ++i)
        for (std::size_t k = 1; k <= tp; ++k) {
          RidgeAccumulator acc(w);
          build(acc, k, i);
          coeffs.push_back(acc.solve(config_.ridge));
        }
    }
    coeffs_ = std::move(coeffs);
    fitted_ = true;
    since_fit_ = 0;
  }

  /// Falls back to persistence (repeat the latest field) when unfitted.
  /// Forecasts are never below the latest ambient temperature.
  std::vector<TemperatureField> predict(double now) const override {
    if (history_.empty()) throw DomainError("MlrPredictor::predict: no history");
    const auto& latest = history_.back();
    const std::size_t tp = config_.horizon;
    const std::size_t w = config_.window;
    const std::size_t n_mod = latest.size();

    std::vector<TemperatureField> out(tp, latest);
    for (std::size_t k = 1; k <= tp; ++k) out[k - 1].time = now + config_.time_step * k;
    if (!fitted_ || history_.size() < w) return out;

    const std::size_t last = history_.size() - 1;
    for (std::size_t i = 0; i < n_mod; ++i) {
      for (std::size_t k = 1; k <= tp; ++k) {
        const auto& beta = config_.pooling ? coeffs_[k - 1] : coeffs_[i * tp + (k - 1)];
        double y = beta[0];
        for (std::size_t l = 0; l < w; ++l) y += beta[l + 1] * history_[last - l].hot_side_temps[i];
        out[k - 1].hot_side_temps[i] = std::max(y, latest.ambient_temp);
      }
    }
    return out;
  }

 private:
  PredictorConfig config_;
  std::deque<TemperatureField> history_;
  std::vector<Eigen::VectorXd> coeffs_;
  bool fitted_ = false;
  std::size_t since_fit_ = 0;
};

/// Returns the true future fields. Used to isolate the controller from
/// forecast error in tests and ablations.
class OraclePredictor final : public TemperaturePredictor {
 public:
  OraclePredictor(std::vector<TemperatureField> future, std::size_t horizon, double time_step = 1.0)
      : fields_(std::move(future)), horizon_(horizon), time_step_(time_step) {
    if (fields_.empty()) throw DomainError("OraclePredictor: no fields");
    if (horizon_ < 1) throw DomainError("OraclePredictor: horizon must be >= 1");
  }

  void observe(const TemperatureField&) override {}

  std::vector<TemperatureField> predict(double now) const override {
    std::vector<TemperatureField> out;
    out.reserve(horizon_);
    for (std::size_t k = 1; k <= horizon_; ++k) {
      const double t = now + time_step_ * k;
      auto it = std::lower_bound(fields_.begin(), fields_.end(), t - 1e-9,
                                 [](const TemperatureField& f, double v) { return f.time < v; });
      out.push_back(it == fields_.end() ? fields_.back() : *it);
      out.back().time = t;
    }
    return out;
  }

  std::size_t horizon() const override { return horizon_; }

 private:
  std::vector<TemperatureField> fields_;
  std::size_t horizon_;
  double time_step_;
};

/// Walks a field sequence online (observe, then forecast) and scores each
/// horizon against the realised fields. Element k-1 covers horizon k.
inline std::vector<MapeReport> evaluate_forecasts(const std::vector<TemperatureField>& fields,
                                                  const PredictorConfig& config,
                                                  bool fitted_only = true) {
  MlrPredictor pred(config);
  std::vector<std::vector<double>> actual(config.horizon), forecast(config.horizon);
  for (std::size_t t = 0; t < fields.size(); ++t) {
    pred.observe(fields[t]);
    if (fitted_only && !pred.fitted()) continue;
    const auto f = pred.predict(fields[t].time);
    for (std::size_t k = 1; k <= config.horizon && t + k < fields.size(); ++k) {
      const auto& a = fields[t + k].hot_side_temps;
      actual[k - 1].insert(actual[k - 1].end(), a.begin(), a.end());
      const auto& p = f[k - 1].hot_side_temps;
      forecast[k - 1].insert(forecast[k - 1].end(), p.begin(), p.end());
    }
  }
  std::vector<MapeReport> out;
  for (std::size_t k = 0; k < config.horizon; ++k) {
    if (actual[k].empty()) throw DomainError("evaluate_forecasts: trace too short to score");
    out.push_back(mape(actual[k], forecast[k]));
  }
  return out;
}

}  // namespace tegrec
