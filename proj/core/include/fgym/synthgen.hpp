#pragma once

// Seeded synthetic series with a noiseless oracle track.
//
// A GeneratorSpec lists additive components whose parameters are ranges. Each
// realization draws one value per range, then builds
//
//   oracle(t)   = sum of deterministic and latent-state terms
//   observed(t) = oracle(t) + noise(t) + anomaly(t), masked to MISSING (MCAR)
//
// Random streams are keyed by (component kind, occurrence of that kind), never
// by list position, so removing the noise / anomaly / missing components from
// a spec leaves the oracle of every realization unchanged.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fgym {

/// One observed value; std::nullopt marks a MISSING step.
using Observation = std::optional<double>;

struct ValueRange {
  double low = 0.0;
  double high = 0.0;

  static constexpr ValueRange exactly(double v) noexcept { return {v, v}; }
  bool operator==(const ValueRange&) const = default;
};

enum class NoiseDist { kGaussian, kUniform };

namespace component {

/// Gaussian uses `scale` as sigma; Uniform emits on [-scale, +scale].
struct Noise {
  NoiseDist dist = NoiseDist::kGaussian;
  ValueRange scale;
  bool operator==(const Noise&) const = default;
};

/// intercept + slope * t, with slope per step.
struct Trend {
  ValueRange slope;
  ValueRange intercept;
  bool operator==(const Trend&) const = default;
};

struct Seasonality {
  int period = 12;
  ValueRange amplitude;
  ValueRange phase;  // radians
  bool operator==(const Seasonality&) const = default;
};

/// Sinusoid whose period is re-drawn from `period_range` at the start of every cycle.
struct Cyclicality {
  ValueRange period_range;
  ValueRange amplitude;
  bool operator==(const Cyclicality&) const = default;
};

/// Latent Markov chain; the oracle adds the mean of the current state.
struct RegimeSwitch {
  std::vector<ValueRange> state_means;
  std::vector<std::vector<double>> transition;  // row-stochastic
  bool operator==(const RegimeSwitch&) const = default;
};

/// Single abrupt change at floor(fraction * length): from there on the oracle
/// gains level_delta + slope_delta * (t - changepoint).
struct ConceptDrift {
  ValueRange changepoint_fraction;
  ValueRange slope_delta;
  ValueRange level_delta;
  bool operator==(const ConceptDrift&) const = default;
};

struct MissingValues {
  ValueRange rate;
  bool operator==(const MissingValues&) const = default;
};

/// Additive spikes of magnitude_sigmas * (noise standard deviation, or 1 without noise).
struct Anomalies {
  ValueRange rate;
  ValueRange magnitude_sigmas;
  bool operator==(const Anomalies&) const = default;
};

}  // namespace component

using ComponentSpec =
    std::variant<component::Noise, component::Trend, component::Seasonality,
                 component::Cyclicality, component::RegimeSwitch, component::ConceptDrift,
                 component::MissingValues, component::Anomalies>;

enum class ComponentKind {
  kNoise,
  kTrend,
  kSeasonality,
  kCyclicality,
  kRegimeSwitch,
  kConceptDrift,
  kMissingValues,
  kAnomalies,
};

inline constexpr int kComponentKindCount = 8;

ComponentKind kind_of(const ComponentSpec& component) noexcept;
/// Schema name, e.g. "regime_switch".
std::string_view kind_name(ComponentKind kind) noexcept;
std::optional<ComponentKind> parse_kind(std::string_view name) noexcept;

/// True for components that touch only the observed track.
bool affects_observed_only(ComponentKind kind) noexcept;

struct GeneratorSpec {
  std::string id;
  int length = 0;
  std::vector<ComponentSpec> components;

  bool operator==(const GeneratorSpec&) const = default;
};

using ParamMap = std::map<std::string, double>;

struct SeriesPair {
  std::vector<Observation> observed;
  std::vector<double> oracle;
  ParamMap params;
  std::optional<std::vector<int>> regime_path;

  std::size_t size() const noexcept { return oracle.size(); }
  bool operator==(const SeriesPair&) const = default;
};

struct TrainTestSplit {
  SeriesPair train;
  SeriesPair test;
};

/// Throws Error{kInvalidSpec} naming the first violated invariant.
void validate(const GeneratorSpec& spec);

/// One uniform draw per range, keyed "<kind>.<field>"; repeated kinds get
/// "<kind>#<n>.<field>" for the n-th repeat (n >= 1).
ParamMap sample_params(const GeneratorSpec& spec, std::uint64_t seed);

SeriesPair generate(const GeneratorSpec& spec, std::uint64_t seed);

/// train = first length - horizon points, test = last horizon points.
/// Requires 0 < horizon and 2 * horizon < length.
TrainTestSplit split(const SeriesPair& pair, int horizon);

/// Same spec without Noise, MissingValues and Anomalies.
GeneratorSpec strip_observation_effects(const GeneratorSpec& spec);

/// {"observed":[..null..],"oracle":[..],"params":{..},"regime_path":[..]|null}
std::string to_json(const SeriesPair& pair);
/// Columns t,observed,oracle; MISSING is an empty field.
std::string to_csv(const SeriesPair& pair);

/// Shortest round-trip decimal form of a double.
std::string format_real(double value);

}  // namespace fgym
