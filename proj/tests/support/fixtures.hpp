#pragma once

// Shared builders for randomized suites and status maps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <random>
#include <string>
#include <vector>

#include "fgym/challenges.hpp"
#include "fgym/harness.hpp"

namespace fgym::testing {

inline Challenge tiny_challenge(std::string id, std::vector<std::string> prerequisites = {},
                                double threshold = 5.0) {
  Challenge c;
  c.id = id;
  c.title = id;
  c.spec = {std::move(id), 40, {component::Trend{{0.5, 1.5}, {10, 20}}}};
  c.horizon = 8;
  c.prerequisites = std::move(prerequisites);
  c.threshold = threshold;
  c.reference = "ols_trend";
  return c;
}

inline std::string fixture_id(std::size_t i) {
  std::string s = "c";
  if (i < 10) s += '0';
  return s + std::to_string(i);
}

/// Random DAG over `n` challenges; each edge points to an earlier challenge.
/// Ids are shuffled against list order so tie-breaking by id is exercised.
inline Suite random_suite(std::mt19937_64& rng, std::size_t n, double edge_probability = 0.25) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(fixture_id(i));
  std::shuffle(ids.begin(), ids.end(), rng);
  std::bernoulli_distribution edge(edge_probability);
  Suite suite;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> pre;
    for (std::size_t j = 0; j < i; ++j)
      if (edge(rng)) pre.push_back(ids[j]);
    suite.challenges.push_back(tiny_challenge(ids[i], std::move(pre)));
  }
  return suite;
}

inline std::map<std::string, Status> random_statuses(std::mt19937_64& rng, const Suite& suite) {
  static constexpr Status kAll[] = {Status::kPass, Status::kFail, Status::kSkip, Status::kError};
  std::uniform_int_distribution<int> pick(0, 4);
  std::map<std::string, Status> out;
  for (const auto& c : suite.challenges) {
    const int k = pick(rng);
    if (k < 4) out[c.id] = kAll[k];
  }
  return out;
}

// Reads the challenge index from the first training value (the intercept)
// and behaves as scripted for that index: perfect line, far-off guess, or throw.
class ScriptedForecaster final : public Forecaster {
 public:
  explicit ScriptedForecaster(const std::vector<Status>* script) : script_(script) {}
  std::string name() const override { return "scripted"; }
  void fit(std::span<const Observation> train) override {
    index_ = static_cast<std::size_t>(*train.front());
    length_ = train.size();
    if ((*script_)[index_] == Status::kError) throw std::runtime_error("scripted fit failure");
  }
  std::vector<double> predict(int horizon) override {
    std::vector<double> out;
    for (int k = 0; k < horizon; ++k) {
      const double t = static_cast<double>(length_ + static_cast<std::size_t>(k));
      out.push_back((*script_)[index_] == Status::kPass ? static_cast<double>(index_) + t : -1000.0);
    }
    return out;
  }
  void reset() override { length_ = 0; }

 private:
  const std::vector<Status>* script_;
  std::size_t index_ = 0;
  std::size_t length_ = 0;
};

struct ScriptedCase {
  Suite suite;
  std::vector<Status> script;  // indexed by list position, which is also the intercept
};

/// Random DAG whose challenges are exact lines with intercept == list position,
/// each scripted to PASS (60%), FAIL (30%) or ERROR (10%).
inline ScriptedCase scripted_case(std::mt19937_64& rng, std::size_t n) {
  ScriptedCase out{random_suite(rng, n), {}};
  std::uniform_int_distribution<int> fate(0, 9);
  for (std::size_t i = 0; i < n; ++i) {
    out.suite.challenges[i].spec.components = {
        component::Trend{{1, 1}, ValueRange::exactly(static_cast<double>(i))}};
    const int f = fate(rng);
    out.script.push_back(f < 6 ? Status::kPass : f < 9 ? Status::kFail : Status::kError);
  }
  return out;
}

inline RunReport run_scripted(const ScriptedCase& c, int parallelism, Gating gating = Gating::kAuto) {
  RunConfig config;
  config.suite = c.suite;
  config.forecaster = "scripted";
  config.factory = [&c] { return std::make_unique<ScriptedForecaster>(&c.script); };
  config.parallelism = parallelism;
  config.gating = gating;
  return run(config);
}

}  // namespace fgym::testing
