#include "fgym/forecasters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "fgym/error.hpp"

namespace fgym {

namespace {

void require_trained(bool fitted, const std::string& name) {
  if (!fitted) throw Error(ErrorCode::kNotFitted, name + ": predict called before fit");
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false when a pivot is negligible relative to the largest diagonal entry.
bool solve_normal_equations(std::vector<std::vector<double>> a, std::vector<double> b,
                            std::vector<double>& x) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
  if (!(scale > 0.0)) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-12 * scale) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

int parse_int(std::string_view text, std::string_view spec) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw Error(ErrorCode::kUnknownForecaster, "bad integer \"" + std::string(text) + "\" in " + std::string(spec));
  return value;
}

std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> impute_locf(std::span<const Observation> train) {
  const auto first = std::find_if(train.begin(), train.end(), [](const Observation& v) { return v.has_value(); });
  if (first == train.end()) throw Error(ErrorCode::kEmptyTrain, "training series has no observed values");
  std::vector<double> out;
  out.reserve(train.size());
  double carry = **first;
  for (const auto& v : train) {
    if (v) carry = *v;
    out.push_back(carry);
  }
  return out;
}

WindowTable make_windows(std::span<const double> values, int window) {
  WindowTable table;
  if (window < 1 || values.size() <= static_cast<std::size_t>(window)) return table;
  const auto w = static_cast<std::size_t>(window);
  const std::size_t rows = values.size() - w;
  table.rows.reserve(rows);
  table.targets.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    table.rows.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(i),
                            values.begin() + static_cast<std::ptrdiff_t>(i + w));
    table.targets.push_back(values[i + w]);
  }
  return table;
}

double lag_autocorrelation(std::span<const double> values, int lag) {
  if (lag < 1 || values.size() <= static_cast<std::size_t>(lag)) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double denom = 0.0;
  for (double v : values) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) return 0.0;
  double num = 0.0;
  for (std::size_t t = static_cast<std::size_t>(lag); t < values.size(); ++t)
    num += (values[t] - mean) * (values[t - static_cast<std::size_t>(lag)] - mean);
  return num / denom;
}

void BuiltinForecaster::fit(std::span<const Observation> train) {
  fitted_ = false;
  clear();
  fit_imputed(train, impute_locf(train));
  fitted_ = true;
}

std::vector<double> BuiltinForecaster::predict(int horizon) {
  require_trained(fitted_, name());
  if (horizon < 1) throw Error(ErrorCode::kInvalidHorizon, name() + ": horizon must be positive");
  return forecast(horizon);
}

void BuiltinForecaster::reset() {
  fitted_ = false;
  clear();
}

// naive

void NaiveLast::fit_imputed(std::span<const Observation>, std::vector<double> values) {
  last_ = values.back();
}

std::vector<double> NaiveLast::forecast(int horizon) const {
  return std::vector<double>(static_cast<std::size_t>(horizon), last_);
}

// mean

void MeanForecaster::fit_imputed(std::span<const Observation> raw, std::vector<double>) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : raw) {
    if (!v) continue;
    sum += *v;
    ++count;
  }
  mean_ = sum / static_cast<double>(count);
}

std::vector<double> MeanForecaster::forecast(int horizon) const {
  return std::vector<double>(static_cast<std::size_t>(horizon), mean_);
}

// seasonal naive

SeasonalNaive::SeasonalNaive(int period) : period_(period) {
  if (period < 1) throw Error(ErrorCode::kUnknownForecaster, "seasonal_naive period must be positive");
}

std::string SeasonalNaive::name() const { return "seasonal_naive:" + std::to_string(period_); }

void SeasonalNaive::fit_imputed(std::span<const Observation>, std::vector<double> values) {
  if (values.size() < static_cast<std::size_t>(period_))
    throw Error(ErrorCode::kPeriodTooLarge, name() + ": period exceeds the training length " +
                                                std::to_string(values.size()));
  cycle_.assign(values.end() - period_, values.end());
}

std::vector<double> SeasonalNaive::forecast(int horizon) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j) out.push_back(cycle_[static_cast<std::size_t>(j % period_)]);
  return out;
}

// ols trend

void OlsTrend::fit_imputed(std::span<const Observation> raw, std::vector<double>) {
  double sum_t = 0.0;
  double sum_y = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (!raw[t]) continue;
    sum_t += static_cast<double>(t);
    sum_y += *raw[t];
    ++count;
  }
  if (count < 2) throw Error(ErrorCode::kTrainTooShort, "ols_trend needs at least 2 observed points");
  const double mean_t = sum_t / static_cast<double>(count);
  const double mean_y = sum_y / static_cast<double>(count);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (!raw[t]) continue;
    const double dt = static_cast<double>(t) - mean_t;
    sxx += dt * dt;
    sxy += dt * (*raw[t] - mean_y);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::kDegenerateFit, "ols_trend: all time indices identical");
  slope_ = sxy / sxx;
  intercept_ = mean_y - slope_ * mean_t;
  length_ = raw.size();
}

std::vector<double> OlsTrend::forecast(int horizon) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j)
    out.push_back(intercept_ + slope_ * static_cast<double>(length_ + static_cast<std::size_t>(j)));
  return out;
}

// knn

KnnRecursive::KnnRecursive(int window, int k) : window_(window), k_(k) {
  if (window < 1 || k < 1) throw Error(ErrorCode::kUnknownForecaster, "knn window and k must be positive");
}

std::string KnnRecursive::name() const {
  return "knn:" + std::to_string(window_) + ":" + std::to_string(k_);
}

void KnnRecursive::fit_imputed(std::span<const Observation>, std::vector<double> values) {
  if (values.size() < static_cast<std::size_t>(window_) + 1)
    throw Error(ErrorCode::kTrainTooShort, name() + " needs at least window + 1 points");
  table_ = make_windows(values, window_);
  tail_.assign(values.end() - window_, values.end());
}

std::vector<double> KnnRecursive::forecast(int horizon) const {
  const std::size_t rows = table_.rows.size();
  const std::size_t k = std::min(rows, static_cast<std::size_t>(k_));
  std::vector<double> query = tail_;
  std::vector<std::pair<double, std::size_t>> dist(rows);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int step = 0; step < horizon; ++step) {
    for (std::size_t i = 0; i < rows; ++i) {
      double d = 0.0;
      const auto& row = table_.rows[i];
      for (std::size_t j = 0; j < query.size(); ++j) d += (row[j] - query[j]) * (row[j] - query[j]);
      dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double sum = 0.0;
    for (std::size_t n = 0; n < k; ++n) sum += table_.targets[dist[n].second];
    const double next = sum / static_cast<double>(k);
    out.push_back(next);
    query.erase(query.begin());
    query.push_back(next);
  }
  return out;
}

// seasonal differencing + AR

SeasonalDiffAr::SeasonalDiffAr(int seasonal_period, int ar_order)
    : period_(seasonal_period), order_(ar_order) {
  if (seasonal_period < 2 || ar_order < 1)
    throw Error(ErrorCode::kUnknownForecaster, "sdar needs period >= 2 and order >= 1");
}

std::string SeasonalDiffAr::name() const {
  return "sdar:" + std::to_string(period_) + ":" + std::to_string(order_);
}

void SeasonalDiffAr::clear() {
  seasonal_ = false;
  fallback_ = false;
  coef_.clear();
  levels_.clear();
  diffs_.clear();
  work_.clear();
}

void SeasonalDiffAr::fit_imputed(std::span<const Observation>, std::vector<double> values) {
  const auto p = static_cast<std::size_t>(order_);
  const auto s = static_cast<std::size_t>(period_);
  if (values.size() < s + p + 10)
    throw Error(ErrorCode::kTrainTooShort, name() + " needs at least period + order + 10 points");
  levels_ = std::move(values);
  diffs_.resize(levels_.size() - 1);
  for (std::size_t t = 1; t < levels_.size(); ++t) diffs_[t - 1] = levels_[t] - levels_[t - 1];

  seasonal_ = lag_autocorrelation(diffs_, period_) > kSeasonalAcfThreshold;
  if (seasonal_) {
    work_.resize(diffs_.size() - s);
    for (std::size_t t = s; t < diffs_.size(); ++t) work_[t - s] = diffs_[t] - diffs_[t - s];
  } else {
    work_ = diffs_;
  }

  const double mean = std::accumulate(work_.begin(), work_.end(), 0.0) / static_cast<double>(work_.size());
  double var = 0.0;
  for (double w : work_) var += (w - mean) * (w - mean);
  var /= static_cast<double>(work_.size());
  double level_scale = 1.0;
  for (double v : levels_) level_scale = std::max(level_scale, std::abs(v));

  // Normal equations for w_t = c + sum_i phi_i w_{t-i}.
  const std::size_t dim = p + 1;
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
  std::vector<double> b(dim, 0.0);
  std::vector<double> x(dim);
  for (std::size_t t = p; t < work_.size(); ++t) {
    x[0] = 1.0;
    for (std::size_t i = 1; i <= p; ++i) x[i] = work_[t - i];
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) a[r][c] += x[r] * x[c];
      b[r] += x[r] * work_[t];
    }
  }
  const bool degenerate = std::sqrt(var) <= 1e-9 * level_scale;
  fallback_ = degenerate || !solve_normal_equations(a, b, coef_);
  if (fallback_) {
    coef_.assign(dim, 0.0);
    coef_[0] = mean;
  }
}

std::vector<double> SeasonalDiffAr::forecast(int horizon) const {
  const auto p = static_cast<std::size_t>(order_);
  const auto s = static_cast<std::size_t>(period_);
  auto run = [&](const std::vector<double>& coef) {
    std::vector<double> work = work_;
    std::vector<double> diffs = diffs_;
    double level = levels_.back();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int j = 0; j < horizon; ++j) {
      double w = coef[0];
      for (std::size_t i = 1; i <= p; ++i) w += coef[i] * work[work.size() - i];
      work.push_back(w);
      const double d = seasonal_ ? w + diffs[diffs.size() - s] : w;
      diffs.push_back(d);
      level += d;
      out.push_back(level);
    }
    return out;
  };
  auto out = run(coef_);
  if (!std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); })) {
    std::vector<double> drift(coef_.size(), 0.0);
    drift[0] = std::accumulate(work_.begin(), work_.end(), 0.0) / static_cast<double>(work_.size());
    out = run(drift);
  }
  return out;
}

// registry

ForecasterFactory builtin_factory(std::string_view spec) {
  const auto parts = split_colon(spec);
  const auto& head = parts.front();
  auto arg = [&](std::size_t i, int fallback) {
    return parts.size() > i ? parse_int(parts[i], spec) : fallback;
  };
  auto arity = [&](std::size_t max_parts) {
    if (parts.size() > max_parts)
      throw Error(ErrorCode::kUnknownForecaster, "too many parameters in \"" + std::string(spec) + "\"");
  };
  if (head == "naive") {
    arity(1);
    return [] { return std::make_unique<NaiveLast>(); };
  }
  if (head == "mean") {
    arity(1);
    return [] { return std::make_unique<MeanForecaster>(); };
  }
  if (head == "ols_trend") {
    arity(1);
    return [] { return std::make_unique<OlsTrend>(); };
  }
  if (head == "seasonal_naive") {
    arity(2);
    const int period = arg(1, 12);
    SeasonalNaive probe(period);
    return [period] { return std::make_unique<SeasonalNaive>(period); };
  }
  if (head == "knn") {
    arity(3);
    const int window = arg(1, 12);
    const int k = arg(2, 5);
    KnnRecursive probe(window, k);
    return [window, k] { return std::make_unique<KnnRecursive>(window, k); };
  }
  if (head == "sdar") {
    arity(3);
    const int period = arg(1, 12);
    const int order = arg(2, 3);
    SeasonalDiffAr probe(period, order);
    return [period, order] { return std::make_unique<SeasonalDiffAr>(period, order); };
  }
  throw Error(ErrorCode::kUnknownForecaster, "unknown forecaster \"" + std::string(spec) + "\"");
}

std::vector<std::string> builtin_names() {
  return {"naive", "mean", "seasonal_naive:12", "ols_trend", "knn:12:5", "sdar:12:3"};
}

}  // namespace fgym
