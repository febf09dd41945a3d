#include "fgym/harness.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <map>
#include <mutex>
#include <thread>

#include "fgym/error.hpp"
#include "fgym/version.hpp"

namespace fgym {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs `work(i, forecaster)` for i in [0, count) on up to `threads` workers,
// each with its own forecaster instance.
template <typename Work>
void parallel_for(std::size_t count, int threads, const ForecasterFactory& factory,
                  std::vector<std::unique_ptr<Forecaster>>& pool, Work&& work) {
  const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  while (pool.size() < workers) pool.push_back(factory());
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i, *pool.front());
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> team;
  team.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    team.emplace_back([&, w] {
      for (std::size_t i = next++; i < count; i = next++) work(i, *pool[w]);
    });
  }
  for (auto& t : team) t.join();
}

}  // namespace

const ChallengeOutcome* RunReport::find(std::string_view id) const noexcept {
  for (const auto& o : outcomes)
    if (o.result.challenge_id == id) return &o;
  return nullptr;
}

ForecasterFactory resolve_forecaster(std::string_view spec, protocol::Timeouts timeouts) {
  constexpr std::string_view kCmd = "cmd:";
  if (spec.substr(0, kCmd.size()) == kCmd) {
    auto argv = protocol::split_command(spec.substr(kCmd.size()));
    if (argv.empty()) throw Error(ErrorCode::kUnknownForecaster, "empty command after \"cmd:\"");
    return [argv, timeouts] { return std::make_unique<protocol::ExternalForecaster>(argv, timeouts); };
  }
  return builtin_factory(spec);
}

ChallengeOutcome run_challenge(const Challenge& challenge, Forecaster& forecaster, std::uint64_t base_seed) {
  ChallengeOutcome outcome;
  std::vector<Score> scores;
  for (int rep = 0; rep < challenge.repetitions; ++rep) {
    RepetitionArtifact art;
    art.rep = rep;
    art.seed = repetition_seed(base_seed, challenge.id, rep);
    auto parts = split(generate(challenge.spec, art.seed), challenge.horizon);
    art.train = std::move(parts.train);
    art.test = std::move(parts.test);

    forecaster.reset();
    forecaster.fit(art.train.observed);
    art.forecast = forecaster.predict(challenge.horizon);
    if (art.forecast.size() != static_cast<std::size_t>(challenge.horizon))
      throw Error(ErrorCode::kInvalidForecast, forecaster.name() + " returned " +
                                                   std::to_string(art.forecast.size()) + " values for horizon " +
                                                   std::to_string(challenge.horizon));
    scores.push_back(smape(art.forecast, art.test.oracle));
    outcome.artifacts.push_back(std::move(art));
  }
  outcome.result = aggregate(challenge, std::move(scores));
  return outcome;
}

ChallengeOutcome run_single(const Suite& suite, std::string_view challenge_id, Forecaster& forecaster,
                            std::uint64_t base_seed) {
  const auto* challenge = suite.find(challenge_id);
  if (challenge == nullptr)
    throw Error(ErrorCode::kUnknownChallenge, "no challenge named \"" + std::string(challenge_id) + "\"");
  try {
    return run_challenge(*challenge, forecaster, base_seed);
  } catch (const std::exception& e) {
    return {errored(*challenge, e.what()), {}};
  }
}

RunReport run(const RunConfig& config) {
  if (config.parallelism < 1) throw Error(ErrorCode::kInvalidSpec, "parallelism must be >= 1");
  const auto factory = config.factory ? config.factory : resolve_forecaster(config.forecaster, config.timeouts);

  RunReport report;
  report.tool_version = kToolVersion;
  report.forecaster = config.forecaster;
  report.base_seed = config.base_seed;
  report.gating = config.gating;
  report.keep_all = config.keep_all;
  report.parallelism = config.parallelism;
  report.started = utc_now();

  const auto& suite = config.suite;
  std::map<std::string, ChallengeOutcome> done;
  std::map<std::string, Status> statuses;
  std::vector<std::unique_ptr<Forecaster>> pool;

  // Challenges at the same depth never depend on each other, so each level
  // is gated against completed statuses and then run concurrently.
  for (const auto& level : depth_levels(suite)) {
    std::vector<const Challenge*> runnable;
    const auto plan = execution_plan(suite, statuses);
    for (const auto& id : level) {
      const auto& challenge = *suite.find(id);
      bool skip = false;
      if (config.gating == Gating::kAuto) {
        for (const auto& entry : plan)
          if (entry.id == id) skip = entry.action == PlanAction::kSkip;
      }
      if (skip) done[id] = {skipped(challenge), {}};
      else runnable.push_back(&challenge);
    }

    std::vector<ChallengeOutcome> results(runnable.size());
    parallel_for(runnable.size(), config.parallelism, factory, pool, [&](std::size_t i, Forecaster& f) {
      try {
        results[i] = run_challenge(*runnable[i], f, config.base_seed);
      } catch (const std::exception& e) {
        results[i] = {errored(*runnable[i], e.what()), {}};
      }
    });
    for (std::size_t i = 0; i < runnable.size(); ++i) done[runnable[i]->id] = std::move(results[i]);
    for (const auto& id : level) statuses[id] = done.at(id).result.status;
  }

  for (const auto& c : suite.challenges) report.outcomes.push_back(std::move(done.at(c.id)));
  report.finished = utc_now();
  return report;
}

int exit_status(const RunReport& report) {
  for (const auto& o : report.outcomes)
    if (o.result.status == Status::kFail || o.result.status == Status::kError) return 1;
  return 0;
}

}  // namespace fgym
