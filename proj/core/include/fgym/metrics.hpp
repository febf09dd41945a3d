#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgym/challenges.hpp"
#include "fgym/status.hpp"

namespace fgym {

struct Score {
  double smape = 0.0;  // percent, [0, 200]
  std::vector<double> per_step_abs_err;

  bool operator==(const Score&) const = default;
};

/// sMAPE = (200 / h) * sum |F - O| / (|F| + |O|); a 0/0 term contributes 0.
/// Throws Error{kLengthMismatch} or Error{kNonFiniteForecast}.
Score smape(std::span<const double> forecast, std::span<const double> oracle);

struct ChallengeResult {
  std::string challenge_id;
  std::vector<Score> rep_scores;
  std::optional<double> mean_smape;  // empty for SKIP and ERROR
  Status status = Status::kSkip;
  std::optional<std::string> error_detail;
  double threshold = 0.0;

  bool operator==(const ChallengeResult&) const = default;
};

/// PASS iff mean <= threshold and every repetition <= 2 * threshold.
Status pass_rule(std::span<const double> rep_smapes, double threshold);

/// Requires rep_scores.size() == challenge.repetitions.
ChallengeResult aggregate(const Challenge& challenge, std::vector<Score> rep_scores);

ChallengeResult skipped(const Challenge& challenge);
ChallengeResult errored(const Challenge& challenge, std::string detail);

}  // namespace fgym
