#pragma once

// The forecaster contract and the built-in reference pipelines.
//
// Built-ins are addressable by registry strings:
//   naive | mean | seasonal_naive:<period> | ols_trend | knn:<window>:<k> | sdar:<period>:<order>
//
// Every built-in imputes MISSING training values by last observation carried
// forward, with leading gaps filled by the first observed value.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgym/synthgen.hpp"

namespace fgym {

class Forecaster {
 public:
  virtual ~Forecaster() = default;

  virtual std::string name() const = 0;
  /// Must tolerate MISSING entries.
  virtual void fit(std::span<const Observation> train) = 0;
  /// Exactly `horizon` values. Throws Error{kNotFitted} before fit().
  virtual std::vector<double> predict(int horizon) = 0;
  /// Back to the unfitted state.
  virtual void reset() = 0;
};

using ForecasterFactory = std::function<std::unique_ptr<Forecaster>()>;

/// Throws Error{kEmptyTrain} when nothing was observed.
std::vector<double> impute_locf(std::span<const Observation> train);

/// Sliding-window reduction: row i is values[i, i + window), target values[i + window].
struct WindowTable {
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
};
WindowTable make_windows(std::span<const double> values, int window);

/// Sample autocorrelation at `lag`; 0 when the series is constant or too short.
double lag_autocorrelation(std::span<const double> values, int lag);

/// Shared fitted-state bookkeeping for the built-ins.
class BuiltinForecaster : public Forecaster {
 public:
  void fit(std::span<const Observation> train) final;
  std::vector<double> predict(int horizon) final;
  void reset() final;

 protected:
  virtual void fit_imputed(std::span<const Observation> raw, std::vector<double> values) = 0;
  virtual std::vector<double> forecast(int horizon) const = 0;
  virtual void clear() {}

 private:
  bool fitted_ = false;
};

class NaiveLast final : public BuiltinForecaster {
 public:
  std::string name() const override { return "naive"; }

 private:
  void fit_imputed(std::span<const Observation>, std::vector<double> values) override;
  std::vector<double> forecast(int horizon) const override;
  double last_ = 0.0;
};

class MeanForecaster final : public BuiltinForecaster {
 public:
  std::string name() const override { return "mean"; }

 private:
  void fit_imputed(std::span<const Observation> raw, std::vector<double>) override;
  std::vector<double> forecast(int horizon) const override;
  double mean_ = 0.0;
};

/// Repeats the last `period` values cyclically.
class SeasonalNaive final : public BuiltinForecaster {
 public:
  explicit SeasonalNaive(int period);
  std::string name() const override;

 private:
  void fit_imputed(std::span<const Observation>, std::vector<double> values) override;
  std::vector<double> forecast(int horizon) const override;
  int period_;
  std::vector<double> cycle_;
};

/// Least-squares line over (t, value) of the observed points, extrapolated.
class OlsTrend final : public BuiltinForecaster {
 public:
  std::string name() const override { return "ols_trend"; }
  double slope() const noexcept { return slope_; }
  double intercept() const noexcept { return intercept_; }

 private:
  void fit_imputed(std::span<const Observation> raw, std::vector<double> values) override;
  std::vector<double> forecast(int horizon) const override;
  double slope_ = 0.0;
  double intercept_ = 0.0;
  std::size_t length_ = 0;
};

/// k-nearest-neighbour regression over lag windows, predicting recursively:
/// each prediction is appended to the window for the next step. Unweighted
/// Euclidean distance; ties go to the earlier window.
class KnnRecursive final : public BuiltinForecaster {
 public:
  explicit KnnRecursive(int window = 12, int k = 5);
  std::string name() const override;

 private:
  void fit_imputed(std::span<const Observation>, std::vector<double> values) override;
  std::vector<double> forecast(int horizon) const override;
  int window_;
  int k_;
  WindowTable table_;
  std::vector<double> tail_;
};

/// First differencing, optional seasonal differencing, least-squares AR with
/// intercept on the differenced series, recursive forecast, then integration.
/// Seasonal differencing is applied iff the lag-`period` autocorrelation of the
/// first differences exceeds kSeasonalAcfThreshold.
class SeasonalDiffAr final : public BuiltinForecaster {
 public:
  static constexpr double kSeasonalAcfThreshold = 0.3;

  explicit SeasonalDiffAr(int seasonal_period = 12, int ar_order = 3);
  std::string name() const override;

  bool seasonal_differencing() const noexcept { return seasonal_; }
  /// Falls back to a drift forecast (AR terms zero) when the normal equations are singular.
  bool used_drift_fallback() const noexcept { return fallback_; }
  /// [intercept, phi_1, ..., phi_p]
  const std::vector<double>& coefficients() const noexcept { return coef_; }

 private:
  void fit_imputed(std::span<const Observation>, std::vector<double> values) override;
  std::vector<double> forecast(int horizon) const override;
  void clear() override;
  int period_;
  int order_;
  bool seasonal_ = false;
  bool fallback_ = false;
  std::vector<double> coef_;
  std::vector<double> levels_;  // imputed training series
  std::vector<double> diffs_;   // first differences
  std::vector<double> work_;    // series the AR model was fitted on
};

/// Parses a built-in registry string. Throws Error{kUnknownForecaster}.
ForecasterFactory builtin_factory(std::string_view spec);
std::vector<std::string> builtin_names();

}  // namespace fgym
