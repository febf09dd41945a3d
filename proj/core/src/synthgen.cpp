#include "fgym/synthgen.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "fgym/error.hpp"
#include "fgym/rng.hpp"
#include "json.hpp"

namespace fgym {

namespace {

using rng::SplitMix64;

constexpr std::array<std::string_view, kComponentKindCount> kKindNames = {
    "noise", "trend", "seasonality", "cyclicality",
    "regime_switch", "concept_drift", "missing_values", "anomalies",
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidSpec, what); }

void check_range(const ValueRange& r, const std::string& name) {
  if (!std::isfinite(r.low) || !std::isfinite(r.high)) invalid(name + " must be finite");
  if (r.low > r.high) invalid(name + " has low > high");
}

void check_range_within(const ValueRange& r, const std::string& name, double lo, double hi,
                        bool hi_inclusive) {
  check_range(r, name);
  const bool hi_ok = hi_inclusive ? r.high <= hi : r.high < hi;
  if (r.low < lo || !hi_ok) invalid(name + " outside its admissible interval");
}

// Stream key for the k-th component of a kind. Purpose 0 draws parameters,
// purpose 1 drives the per-step process of that component.
std::uint64_t stream_key(ComponentKind kind, int occurrence, int purpose) {
  const auto tag = rng::fnv1a64(kind_name(kind));
  return rng::derive(rng::derive(tag, static_cast<std::uint64_t>(occurrence)),
                     static_cast<std::uint64_t>(purpose));
}

std::string param_prefix(ComponentKind kind, int occurrence) {
  std::string prefix(kind_name(kind));
  if (occurrence > 0) prefix += "#" + std::to_string(occurrence);
  return prefix;
}

double noise_stddev(const component::Noise& noise, double scale) {
  return noise.dist == NoiseDist::kGaussian ? scale : scale / std::sqrt(3.0);
}

// Per-component realized parameters, in draw order.
struct Realized {
  ComponentKind kind;
  int occurrence;
  std::string prefix;
  std::vector<std::pair<std::string, double>> values;

  double get(std::string_view field) const {
    for (const auto& [name, v] : values)
      if (name == field) return v;
    return 0.0;
  }
};

std::vector<Realized> realize(const GeneratorSpec& spec, std::uint64_t seed) {
  std::array<int, kComponentKindCount> seen{};
  std::vector<Realized> out;
  out.reserve(spec.components.size());
  for (const auto& c : spec.components) {
    const auto kind = kind_of(c);
    const int occurrence = seen[static_cast<int>(kind)]++;
    Realized r{kind, occurrence, param_prefix(kind, occurrence), {}};
    auto draws = rng::stream(seed, stream_key(kind, occurrence, 0));
    auto draw = [&](std::string name, const ValueRange& range) {
      r.values.emplace_back(std::move(name), draws.uniform(range.low, range.high));
    };
    std::visit(
        [&](const auto& comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, component::Noise>) {
            draw("scale", comp.scale);
          } else if constexpr (std::is_same_v<T, component::Trend>) {
            draw("slope", comp.slope);
            draw("intercept", comp.intercept);
          } else if constexpr (std::is_same_v<T, component::Seasonality>) {
            draw("amplitude", comp.amplitude);
            draw("phase", comp.phase);
          } else if constexpr (std::is_same_v<T, component::Cyclicality>) {
            draw("amplitude", comp.amplitude);
            draw("first_period", comp.period_range);
          } else if constexpr (std::is_same_v<T, component::RegimeSwitch>) {
            for (std::size_t s = 0; s < comp.state_means.size(); ++s)
              draw("state_mean" + std::to_string(s), comp.state_means[s]);
          } else if constexpr (std::is_same_v<T, component::ConceptDrift>) {
            draw("changepoint_fraction", comp.changepoint_fraction);
            draw("slope_delta", comp.slope_delta);
            draw("level_delta", comp.level_delta);
          } else if constexpr (std::is_same_v<T, component::MissingValues>) {
            draw("rate", comp.rate);
          } else if constexpr (std::is_same_v<T, component::Anomalies>) {
            draw("rate", comp.rate);
            draw("magnitude_sigmas", comp.magnitude_sigmas);
          }
        },
        c);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> markov_path(const component::RegimeSwitch& rs, int length, SplitMix64& g) {
  const auto states = static_cast<std::uint32_t>(rs.state_means.size());
  std::vector<int> path(static_cast<std::size_t>(length));
  int state = static_cast<int>(g.below(states));
  for (int t = 0; t < length; ++t) {
    if (t > 0) {
      const double u = g.uniform01();
      const auto& row = rs.transition[static_cast<std::size_t>(state)];
      double cumulative = 0.0;
      int next = static_cast<int>(row.size()) - 1;
      for (std::size_t j = 0; j < row.size(); ++j) {
        cumulative += row[j];
        if (u < cumulative) {
          next = static_cast<int>(j);
          break;
        }
      }
      // Rows sum to 1 only within 1e-9; a u above the cumulative sum falls on
      // the last state with nonzero probability.
      while (next > 0 && row[static_cast<std::size_t>(next)] == 0.0) --next;
      state = next;
    }
    path[static_cast<std::size_t>(t)] = state;
  }
  return path;
}

}  // namespace

ComponentKind kind_of(const ComponentSpec& component) noexcept {
  return static_cast<ComponentKind>(component.index());
}

std::string_view kind_name(ComponentKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ComponentKind> parse_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<ComponentKind>(i);
  return std::nullopt;
}

bool affects_observed_only(ComponentKind kind) noexcept {
  return kind == ComponentKind::kNoise || kind == ComponentKind::kMissingValues ||
         kind == ComponentKind::kAnomalies;
}

void validate(const GeneratorSpec& spec) {
  if (spec.length < 1) invalid("length must be positive");
  std::array<int, kComponentKindCount> counts{};
  double max_period = 0.0;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    const auto kind = kind_of(c);
    ++counts[static_cast<int>(kind)];
    const std::string where = "component " + std::to_string(i) + " (" +
                              std::string(kind_name(kind)) + ")";
    std::visit(
        [&](const auto& comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, component::Noise>) {
            check_range_within(comp.scale, where + ".scale", 0.0, HUGE_VAL, true);
          } else if constexpr (std::is_same_v<T, component::Trend>) {
            check_range(comp.slope, where + ".slope");
            check_range(comp.intercept, where + ".intercept");
          } else if constexpr (std::is_same_v<T, component::Seasonality>) {
            if (comp.period < 2) invalid(where + ".period must be >= 2");
            check_range(comp.amplitude, where + ".amplitude");
            check_range(comp.phase, where + ".phase");
            max_period = std::max(max_period, static_cast<double>(comp.period));
          } else if constexpr (std::is_same_v<T, component::Cyclicality>) {
            check_range(comp.period_range, where + ".period_range");
            if (comp.period_range.low < 2.0) invalid(where + ".period_range must be >= 2");
            check_range(comp.amplitude, where + ".amplitude");
            max_period = std::max(max_period, comp.period_range.high);
          } else if constexpr (std::is_same_v<T, component::RegimeSwitch>) {
            const auto n = comp.state_means.size();
            if (n < 2) invalid(where + " needs at least 2 states");
            for (std::size_t s = 0; s < n; ++s)
              check_range(comp.state_means[s], where + ".state_means[" + std::to_string(s) + "]");
            if (comp.transition.size() != n) invalid(where + ".transition must be square");
            for (const auto& row : comp.transition) {
              if (row.size() != n) invalid(where + ".transition must be square");
              double sum = 0.0;
              for (double p : row) {
                if (!(p >= 0.0) || !std::isfinite(p))
                  invalid(where + ".transition has a negative entry");
                sum += p;
              }
              if (std::abs(sum - 1.0) > 1e-9) invalid(where + ".transition row does not sum to 1");
            }
          } else if constexpr (std::is_same_v<T, component::ConceptDrift>) {
            check_range(comp.changepoint_fraction, where + ".changepoint_fraction");
            if (comp.changepoint_fraction.low <= 0.0 || comp.changepoint_fraction.high >= 1.0)
              invalid(where + ".changepoint_fraction must lie in (0, 1)");
            check_range(comp.slope_delta, where + ".slope_delta");
            check_range(comp.level_delta, where + ".level_delta");
          } else if constexpr (std::is_same_v<T, component::MissingValues>) {
            check_range_within(comp.rate, where + ".rate", 0.0, 1.0, false);
          } else if constexpr (std::is_same_v<T, component::Anomalies>) {
            check_range_within(comp.rate, where + ".rate", 0.0, 1.0, false);
            check_range(comp.magnitude_sigmas, where + ".magnitude_sigmas");
          }
        },
        c);
  }
  for (auto kind : {ComponentKind::kNoise, ComponentKind::kMissingValues, ComponentKind::kAnomalies})
    if (counts[static_cast<int>(kind)] > 1)
      invalid("at most one " + std::string(kind_name(kind)) + " component is allowed");
  if (static_cast<double>(spec.length) < 3.0 * max_period)
    invalid("length " + std::to_string(spec.length) + " is shorter than 3x the longest period");
}

ParamMap sample_params(const GeneratorSpec& spec, std::uint64_t seed) {
  validate(spec);
  ParamMap out;
  for (const auto& r : realize(spec, seed))
    for (const auto& [field, v] : r.values) out[r.prefix + "." + field] = v;
  return out;
}

SeriesPair generate(const GeneratorSpec& spec, std::uint64_t seed) {
  validate(spec);
  const auto realized = realize(spec, seed);
  const int n = spec.length;
  const auto un = static_cast<std::size_t>(n);

  SeriesPair pair;
  pair.oracle.assign(un, 0.0);
  for (const auto& r : realized)
    for (const auto& [field, v] : r.values) pair.params[r.prefix + "." + field] = v;

  const component::Noise* noise = nullptr;
  const Realized* noise_params = nullptr;
  const Realized* missing_params = nullptr;
  const Realized* anomaly_params = nullptr;

  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& r = realized[i];
    auto process = rng::stream(seed, stream_key(r.kind, r.occurrence, 1));
    std::visit(
        [&](const auto& comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, component::Noise>) {
            noise = &comp;
            noise_params = &r;
          } else if constexpr (std::is_same_v<T, component::Trend>) {
            const double slope = r.get("slope");
            const double intercept = r.get("intercept");
            for (int t = 0; t < n; ++t) pair.oracle[static_cast<std::size_t>(t)] += intercept + slope * t;
          } else if constexpr (std::is_same_v<T, component::Seasonality>) {
            const double amplitude = r.get("amplitude");
            const double phase = r.get("phase");
            const double w = 2.0 * std::numbers::pi / comp.period;
            for (int t = 0; t < n; ++t)
              pair.oracle[static_cast<std::size_t>(t)] += amplitude * std::sin(w * t + phase);
          } else if constexpr (std::is_same_v<T, component::Cyclicality>) {
            const double amplitude = r.get("amplitude");
            double period = r.get("first_period");
            double cycle_start = 0.0;
            for (int t = 0; t < n; ++t) {
              while (t - cycle_start >= period) {
                cycle_start += period;
                period = process.uniform(comp.period_range.low, comp.period_range.high);
              }
              pair.oracle[static_cast<std::size_t>(t)] +=
                  amplitude * std::sin(2.0 * std::numbers::pi * (t - cycle_start) / period);
            }
          } else if constexpr (std::is_same_v<T, component::RegimeSwitch>) {
            auto path = markov_path(comp, n, process);
            for (std::size_t t = 0; t < un; ++t)
              pair.oracle[t] += r.values[static_cast<std::size_t>(path[t])].second;
            if (!pair.regime_path) pair.regime_path = std::move(path);
          } else if constexpr (std::is_same_v<T, component::ConceptDrift>) {
            const auto changepoint =
                static_cast<int>(std::floor(r.get("changepoint_fraction") * n));
            const double slope_delta = r.get("slope_delta");
            const double level_delta = r.get("level_delta");
            for (int t = changepoint; t < n; ++t)
              pair.oracle[static_cast<std::size_t>(t)] += level_delta + slope_delta * (t - changepoint);
          } else if constexpr (std::is_same_v<T, component::MissingValues>) {
            missing_params = &r;
          } else if constexpr (std::is_same_v<T, component::Anomalies>) {
            anomaly_params = &r;
          }
        },
        spec.components[i]);
  }

  std::vector<double> observed = pair.oracle;

  double sigma = 1.0;
  if (noise != nullptr) {
    const double scale = noise_params->get("scale");
    sigma = noise_stddev(*noise, scale);
    auto g = rng::stream(seed, stream_key(ComponentKind::kNoise, 0, 1));
    for (auto& v : observed)
      v += noise->dist == NoiseDist::kGaussian ? scale * g.normal() : g.uniform(-scale, scale);
  }
  if (anomaly_params != nullptr) {
    const double rate = anomaly_params->get("rate");
    const double magnitude = anomaly_params->get("magnitude_sigmas") * sigma;
    auto g = rng::stream(seed, stream_key(ComponentKind::kAnomalies, 0, 1));
    for (auto& v : observed)
      if (g.bernoulli(rate)) v += (g.next() >> 63) != 0 ? magnitude : -magnitude;
  }

  pair.observed.assign(observed.begin(), observed.end());
  if (missing_params != nullptr) {
    const double rate = missing_params->get("rate");
    auto g = rng::stream(seed, stream_key(ComponentKind::kMissingValues, 0, 1));
    for (auto& v : pair.observed)
      if (g.bernoulli(rate)) v.reset();
  }
  return pair;
}

TrainTestSplit split(const SeriesPair& pair, int horizon) {
  const auto n = static_cast<long long>(pair.size());
  if (horizon <= 0)
    throw Error(ErrorCode::kInvalidHorizon, "horizon must be positive, got " + std::to_string(horizon));
  if (2LL * horizon >= n)
    throw Error(ErrorCode::kHorizonTooLarge, "horizon " + std::to_string(horizon) +
                                                 " is not below half the length " + std::to_string(n));
  const auto cut = static_cast<std::ptrdiff_t>(n - horizon);
  TrainTestSplit out;
  auto slice = [&](SeriesPair& dst, std::ptrdiff_t from, std::ptrdiff_t to) {
    dst.observed.assign(pair.observed.begin() + from, pair.observed.begin() + to);
    dst.oracle.assign(pair.oracle.begin() + from, pair.oracle.begin() + to);
    dst.params = pair.params;
    if (pair.regime_path)
      dst.regime_path.emplace(pair.regime_path->begin() + from, pair.regime_path->begin() + to);
  };
  slice(out.train, 0, cut);
  slice(out.test, cut, static_cast<std::ptrdiff_t>(n));
  return out;
}

GeneratorSpec strip_observation_effects(const GeneratorSpec& spec) {
  GeneratorSpec out{spec.id, spec.length, {}};
  for (const auto& c : spec.components)
    if (!affects_observed_only(kind_of(c))) out.components.push_back(c);
  return out;
}

std::string format_real(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), end);
}

std::string to_json(const SeriesPair& pair) {
  nlohmann::json j;
  auto& observed = j["observed"] = nlohmann::json::array();
  for (const auto& v : pair.observed) observed.push_back(v ? nlohmann::json(*v) : nlohmann::json());
  j["oracle"] = pair.oracle;
  j["params"] = pair.params;
  j["regime_path"] = pair.regime_path ? nlohmann::json(*pair.regime_path) : nlohmann::json();
  return j.dump();
}

std::string to_csv(const SeriesPair& pair) {
  std::ostringstream out;
  out << "t,observed,oracle\n";
  for (std::size_t t = 0; t < pair.size(); ++t) {
    out << t << ',';
    if (pair.observed[t]) out << format_real(*pair.observed[t]);
    out << ',' << format_real(pair.oracle[t]) << '\n';
  }
  return out.str();
}

}  // namespace fgym
