#pragma once

// Suite orchestration: generate, split, fit, predict, score, gate.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fgym/challenges.hpp"
#include "fgym/forecasters.hpp"
#include "fgym/metrics.hpp"
#include "fgym/protocol.hpp"

namespace fgym {

enum class Gating { kAuto, kOff };

struct RunConfig {
  Suite suite;
  std::string forecaster;     // registry name or "cmd: ..."
  ForecasterFactory factory;  // resolved from `forecaster` when empty
  std::uint64_t base_seed = 0;
  Gating gating = Gating::kAuto;
  int parallelism = 1;
  std::filesystem::path output_dir;
  bool keep_all = false;
  protocol::Timeouts timeouts;
};

struct RepetitionArtifact {
  int rep = 0;
  std::uint64_t seed = 0;
  SeriesPair train;
  SeriesPair test;
  std::vector<double> forecast;

  bool operator==(const RepetitionArtifact&) const = default;
};

struct ChallengeOutcome {
  ChallengeResult result;
  std::vector<RepetitionArtifact> artifacts;  // present iff PASS or FAIL

  bool operator==(const ChallengeOutcome&) const = default;
};

struct RunReport {
  std::string tool_version;
  std::string forecaster;
  std::uint64_t base_seed = 0;
  Gating gating = Gating::kAuto;
  bool keep_all = false;
  int parallelism = 1;
  std::string started;   // ISO-8601 UTC
  std::string finished;  // ISO-8601 UTC
  std::vector<ChallengeOutcome> outcomes;  // suite order

  const ChallengeOutcome* find(std::string_view id) const noexcept;
};

/// Built-in registry names, or "cmd:<command line>" for a protocol v1 child.
ForecasterFactory resolve_forecaster(std::string_view spec, protocol::Timeouts timeouts = {});

/// Runs every challenge. Forecaster failures become ERROR results; the run
/// itself only throws when the forecaster cannot be constructed.
RunReport run(const RunConfig& config);

/// One challenge with the per-repetition seeds derived from `base_seed`.
/// Throws Error{kUnknownChallenge}.
ChallengeOutcome run_single(const Suite& suite, std::string_view challenge_id, Forecaster& forecaster,
                            std::uint64_t base_seed);

/// Runs a challenge without catching forecaster failures.
ChallengeOutcome run_challenge(const Challenge& challenge, Forecaster& forecaster, std::uint64_t base_seed);

/// 0 when every non-skipped challenge passed, 1 if any FAIL or ERROR.
int exit_status(const RunReport& report);

// Threshold calibration: the challenge's reference forecaster is run on
// `seeds` base seeds disjoint from user seeds; threshold =
// max(kThresholdFloor, ceil4(1.25 * p95(mean sMAPE))), where ceil4 rounds up
// to 4 decimals and p95 interpolates linearly between order statistics.

inline constexpr int kCalibrationSeeds = 200;
inline constexpr double kCalibrationMargin = 1.25;
inline constexpr double kThresholdFloor = 0.5;
inline constexpr std::uint64_t kCalibrationSeedSalt = 0xCA11B8A7E5EED000ULL;

struct CalibrationRow {
  std::string id;
  std::string reference;
  double p95 = 0.0;
  double threshold = 0.0;
};

std::uint64_t calibration_seed(int index);
/// Linear interpolation between order statistics (the "type 7" estimator).
double quantile(std::vector<double> values, double q);
std::vector<CalibrationRow> calibrate(const Suite& suite, int seeds = kCalibrationSeeds, int parallelism = 1);
Suite with_thresholds(Suite suite, const std::vector<CalibrationRow>& rows);

}  // namespace fgym
