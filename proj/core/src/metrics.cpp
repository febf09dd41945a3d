#include "fgym/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fgym/error.hpp"

namespace fgym {

std::string_view to_string(Status status) noexcept {
  switch (status) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kSkip: return "SKIP";
    case Status::kError: return "ERROR";
  }
  return "ERROR";
}

std::optional<Status> parse_status(std::string_view text) noexcept {
  for (auto s : {Status::kPass, Status::kFail, Status::kSkip, Status::kError})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

Score smape(std::span<const double> forecast, std::span<const double> oracle) {
  if (forecast.size() != oracle.size() || forecast.empty())
    throw Error(ErrorCode::kLengthMismatch,
                "forecast has " + std::to_string(forecast.size()) + " values, oracle has " +
                    std::to_string(oracle.size()));
  Score score;
  score.per_step_abs_err.reserve(forecast.size());
  double total = 0.0;
  for (std::size_t t = 0; t < forecast.size(); ++t) {
    if (!std::isfinite(forecast[t]))
      throw Error(ErrorCode::kNonFiniteForecast, "forecast step " + std::to_string(t) + " is not finite");
    const double err = std::abs(forecast[t] - oracle[t]);
    const double denom = std::abs(forecast[t]) + std::abs(oracle[t]);
    score.per_step_abs_err.push_back(err);
    if (denom > 0.0) total += err / denom;
  }
  score.smape = 200.0 * total / static_cast<double>(forecast.size());
  return score;
}

Status pass_rule(std::span<const double> rep_smapes, double threshold) {
  if (rep_smapes.empty()) return Status::kFail;
  const double mean = std::accumulate(rep_smapes.begin(), rep_smapes.end(), 0.0) /
                      static_cast<double>(rep_smapes.size());
  const double worst = *std::max_element(rep_smapes.begin(), rep_smapes.end());
  return mean <= threshold && worst <= 2.0 * threshold ? Status::kPass : Status::kFail;
}

ChallengeResult aggregate(const Challenge& challenge, std::vector<Score> rep_scores) {
  if (rep_scores.size() != static_cast<std::size_t>(challenge.repetitions))
    throw Error(ErrorCode::kLengthMismatch, "challenge " + challenge.id + " expects " +
                                                std::to_string(challenge.repetitions) +
                                                " repetition scores, got " +
                                                std::to_string(rep_scores.size()));
  std::vector<double> values;
  values.reserve(rep_scores.size());
  for (const auto& s : rep_scores) values.push_back(s.smape);

  ChallengeResult result;
  result.challenge_id = challenge.id;
  result.threshold = challenge.threshold;
  result.mean_smape =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  result.status = pass_rule(values, challenge.threshold);
  result.rep_scores = std::move(rep_scores);
  return result;
}

ChallengeResult skipped(const Challenge& challenge) {
  ChallengeResult result;
  result.challenge_id = challenge.id;
  result.threshold = challenge.threshold;
  result.status = Status::kSkip;
  return result;
}

ChallengeResult errored(const Challenge& challenge, std::string detail) {
  ChallengeResult result;
  result.challenge_id = challenge.id;
  result.threshold = challenge.threshold;
  result.status = Status::kError;
  result.error_detail = std::move(detail);
  return result;
}

}  // namespace fgym
