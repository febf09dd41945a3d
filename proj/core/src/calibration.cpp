#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fgym/error.hpp"
#include "fgym/harness.hpp"
#include "fgym/rng.hpp"

namespace fgym {

std::uint64_t calibration_seed(int index) {
  return rng::derive(kCalibrationSeedSalt, static_cast<std::uint64_t>(index));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kLengthMismatch, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<CalibrationRow> calibrate(const Suite& suite, int seeds, int parallelism) {
  if (seeds < 1) throw Error(ErrorCode::kInvalidSpec, "calibration needs at least one seed");
  std::vector<CalibrationRow> rows;
  for (const auto& challenge : suite.challenges) {
    const auto factory = resolve_forecaster(challenge.reference);
    std::vector<double> means(static_cast<std::size_t>(seeds));
    std::atomic<int> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
      try {
        auto forecaster = factory();
        for (int i = next++; i < seeds; i = next++) {
          const auto outcome = run_challenge(challenge, *forecaster, calibration_seed(i));
          means[static_cast<std::size_t>(i)] = *outcome.result.mean_smape;
        }
      } catch (...) {
        // Drain the queue so the other workers stop early.
        next = seeds;
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    const int threads = std::clamp(parallelism, 1, seeds);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> team;
      for (int t = 0; t < threads; ++t) team.emplace_back(worker);
      for (auto& t : team) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    CalibrationRow row;
    row.id = challenge.id;
    row.reference = challenge.reference;
    row.p95 = quantile(means, 0.95);
    row.threshold = std::max(kThresholdFloor, std::ceil(kCalibrationMargin * row.p95 * 1e4) / 1e4);
    rows.push_back(std::move(row));
  }
  return rows;
}

Suite with_thresholds(Suite suite, const std::vector<CalibrationRow>& rows) {
  for (const auto& row : rows) {
    auto it = std::find_if(suite.challenges.begin(), suite.challenges.end(),
                           [&](const Challenge& c) { return c.id == row.id; });
    if (it == suite.challenges.end())
      throw Error(ErrorCode::kUnknownChallenge, "no challenge named \"" + row.id + "\"");
    it->threshold = row.threshold;
  }
  return suite;
}

}  // namespace fgym
