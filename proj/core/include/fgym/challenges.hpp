#pragma once

// Challenge catalog and the prerequisite DAG.
//
// A suite document is JSON:
//
//   {
//     "schema_version": 1,
//     "base_seed": 0,
//     "challenges": [
//       {
//         "id": "trend", "title": "Linear trend",
//         "length": 120, "horizon": 20, "repetitions": 3,
//         "prerequisites": [], "threshold": 0.5, "reference": "sdar:12:3",
//         "components": [ {"type": "trend", "slope": [0.5, 2.0], "intercept": [10, 50]} ]
//       }
//     ]
//   }
//
// See README.md for every component's fields.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fgym/status.hpp"
#include "fgym/synthgen.hpp"

namespace fgym {

inline constexpr int kSuiteSchemaVersion = 1;
inline constexpr int kDefaultRepetitions = 3;

struct Challenge {
  std::string id;
  std::string title;
  GeneratorSpec spec;  // spec.id == id
  int horizon = 0;
  int repetitions = kDefaultRepetitions;
  std::vector<std::string> prerequisites;
  double threshold = 0.0;  // sMAPE percent
  std::string reference;   // forecaster used to calibrate `threshold`

  bool operator==(const Challenge&) const = default;
};

struct Suite {
  int schema_version = kSuiteSchemaVersion;
  std::uint64_t base_seed = 0;
  std::vector<Challenge> challenges;

  const Challenge* find(std::string_view id) const noexcept;
  bool operator==(const Suite&) const = default;
};

/// The default catalog compiled in from core/data/builtin_suite.json.
const Suite& builtin_suite();

/// Parses and validates a suite document.
/// Throws ParseError, Error{kUnknownComponent}, CyclicPrerequisitesError, or
/// Error{kInvalidSpec}.
Suite load_suite(std::string_view document);

/// Canonical form: sorted keys, two-space indent, trailing newline.
std::string serialize_suite(const Suite& suite);

/// Checks ids, prerequisite references, acyclicity, topological order, and
/// every generator spec.
void validate_suite(const Suite& suite);

enum class PlanAction { kRun, kSkip };

struct PlanEntry {
  std::string id;
  PlanAction action;

  bool operator==(const PlanEntry&) const = default;
};

/// Topological order with ties broken by id. A challenge is SKIP iff any
/// transitive prerequisite is FAIL, SKIP or ERROR in `completed`.
std::vector<PlanEntry> execution_plan(const Suite& suite,
                                      const std::map<std::string, Status>& completed);

/// Challenge ids grouped by DAG depth (depth 0 has no prerequisites); each
/// group sorted by id.
std::vector<std::vector<std::string>> depth_levels(const Suite& suite);

/// All ids reachable through prerequisite edges from `id`.
std::vector<std::string> transitive_prerequisites(const Suite& suite, std::string_view id);

/// derive(derive(base_seed, fnv1a64(id)), rep): disjoint across challenges and repetitions.
std::uint64_t repetition_seed(std::uint64_t base_seed, std::string_view challenge_id, int rep);

}  // namespace fgym
