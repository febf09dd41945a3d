#include "fgym/challenges.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <type_traits>

#include "fgym/error.hpp"
#include "fgym/rng.hpp"
#include "json.hpp"

namespace fgym {

namespace detail {
extern const std::string_view kBuiltinSuiteJson;
}  // namespace detail

namespace {

using nlohmann::json;

// Reads typed members out of a json object, reporting schema errors with a
// JSON pointer to the offending member.
class Reader {
 public:
  Reader(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(pointer_.empty() ? "/" : pointer_, message);
  }

  std::string at(std::string_view key) const { return pointer_ + "/" + std::string(key); }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }

  const json& member(std::string_view key) const {
    const auto it = node_.find(std::string(key));
    if (it == node_.end()) fail("missing required member \"" + std::string(key) + "\"");
    return *it;
  }

  std::string string(std::string_view key) const {
    const auto& v = member(key);
    if (!v.is_string()) throw ParseError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::int64_t integer(std::string_view key) const {
    const auto& v = member(key);
    if (!v.is_number_integer()) throw ParseError(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(std::string_view key) const {
    const auto& v = member(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ParseError(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  double real(std::string_view key) const {
    const auto& v = member(key);
    if (!v.is_number()) throw ParseError(at(key), "expected a number");
    return v.get<double>();
  }

  ValueRange range(std::string_view key) const { return to_range(member(key), at(key)); }

  static ValueRange to_range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ParseError(where, "expected a [low, high] pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  void only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, _] : node_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ParseError(at(key), "unexpected member \"" + key + "\"");
    }
  }

 private:
  const json& node_;
  std::string pointer_;
};

json range_json(const ValueRange& r) { return json::array({r.low, r.high}); }

ComponentSpec parse_component(const json& node, const std::string& pointer) {
  const Reader r(node, pointer);
  const auto type = r.string("type");
  const auto kind = parse_kind(type);
  if (!kind) throw Error(ErrorCode::kUnknownComponent, "at " + r.at("type") + ": unknown component \"" + type + "\"");
  switch (*kind) {
    case ComponentKind::kNoise: {
      r.only({"type", "dist", "scale"});
      const auto dist = r.string("dist");
      component::Noise c;
      if (dist == "gaussian") c.dist = NoiseDist::kGaussian;
      else if (dist == "uniform") c.dist = NoiseDist::kUniform;
      else throw ParseError(r.at("dist"), "dist must be \"gaussian\" or \"uniform\"");
      c.scale = r.range("scale");
      return c;
    }
    case ComponentKind::kTrend:
      r.only({"type", "slope", "intercept"});
      return component::Trend{r.range("slope"), r.range("intercept")};
    case ComponentKind::kSeasonality: {
      r.only({"type", "period", "amplitude", "phase"});
      const auto period = r.integer("period");
      if (period < 0 || period > 1'000'000'000) throw ParseError(r.at("period"), "period out of range");
      return component::Seasonality{static_cast<int>(period), r.range("amplitude"), r.range("phase")};
    }
    case ComponentKind::kCyclicality:
      r.only({"type", "period_range", "amplitude"});
      return component::Cyclicality{r.range("period_range"), r.range("amplitude")};
    case ComponentKind::kRegimeSwitch: {
      r.only({"type", "state_means", "transition"});
      component::RegimeSwitch c;
      const auto& means = r.member("state_means");
      if (!means.is_array()) throw ParseError(r.at("state_means"), "expected an array of ranges");
      for (std::size_t i = 0; i < means.size(); ++i)
        c.state_means.push_back(Reader::to_range(means[i], r.at("state_means") + "/" + std::to_string(i)));
      const auto& matrix = r.member("transition");
      if (!matrix.is_array()) throw ParseError(r.at("transition"), "expected a matrix");
      for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto where = r.at("transition") + "/" + std::to_string(i);
        if (!matrix[i].is_array()) throw ParseError(where, "expected a row of numbers");
        std::vector<double> row;
        for (const auto& p : matrix[i]) {
          if (!p.is_number()) throw ParseError(where, "expected a row of numbers");
          row.push_back(p.get<double>());
        }
        c.transition.push_back(std::move(row));
      }
      return c;
    }
    case ComponentKind::kConceptDrift:
      r.only({"type", "changepoint_fraction", "slope_delta", "level_delta"});
      return component::ConceptDrift{r.range("changepoint_fraction"), r.range("slope_delta"),
                                     r.range("level_delta")};
    case ComponentKind::kMissingValues:
      r.only({"type", "rate"});
      return component::MissingValues{r.range("rate")};
    case ComponentKind::kAnomalies:
      r.only({"type", "rate", "magnitude_sigmas"});
      return component::Anomalies{r.range("rate"), r.range("magnitude_sigmas")};
  }
  throw Error(ErrorCode::kUnknownComponent, type);
}

json component_json(const ComponentSpec& c) {
  json j;
  j["type"] = std::string(kind_name(kind_of(c)));
  std::visit(
      [&](const auto& comp) {
        using T = std::decay_t<decltype(comp)>;
        if constexpr (std::is_same_v<T, component::Noise>) {
          j["dist"] = comp.dist == NoiseDist::kGaussian ? "gaussian" : "uniform";
          j["scale"] = range_json(comp.scale);
        } else if constexpr (std::is_same_v<T, component::Trend>) {
          j["slope"] = range_json(comp.slope);
          j["intercept"] = range_json(comp.intercept);
        } else if constexpr (std::is_same_v<T, component::Seasonality>) {
          j["period"] = comp.period;
          j["amplitude"] = range_json(comp.amplitude);
          j["phase"] = range_json(comp.phase);
        } else if constexpr (std::is_same_v<T, component::Cyclicality>) {
          j["period_range"] = range_json(comp.period_range);
          j["amplitude"] = range_json(comp.amplitude);
        } else if constexpr (std::is_same_v<T, component::RegimeSwitch>) {
          auto means = json::array();
          for (const auto& m : comp.state_means) means.push_back(range_json(m));
          j["state_means"] = std::move(means);
          j["transition"] = comp.transition;
        } else if constexpr (std::is_same_v<T, component::ConceptDrift>) {
          j["changepoint_fraction"] = range_json(comp.changepoint_fraction);
          j["slope_delta"] = range_json(comp.slope_delta);
          j["level_delta"] = range_json(comp.level_delta);
        } else if constexpr (std::is_same_v<T, component::MissingValues>) {
          j["rate"] = range_json(comp.rate);
        } else if constexpr (std::is_same_v<T, component::Anomalies>) {
          j["rate"] = range_json(comp.rate);
          j["magnitude_sigmas"] = range_json(comp.magnitude_sigmas);
        }
      },
      c);
  return j;
}

Challenge parse_challenge(const json& node, const std::string& pointer) {
  const Reader r(node, pointer);
  r.only({"id", "title", "length", "horizon", "repetitions", "prerequisites", "threshold",
          "reference", "components"});
  Challenge c;
  c.id = r.string("id");
  c.title = r.has("title") ? r.string("title") : c.id;
  const auto length = r.integer("length");
  const auto horizon = r.integer("horizon");
  const auto reps = r.has("repetitions") ? r.integer("repetitions") : kDefaultRepetitions;
  constexpr std::int64_t kMax = 100'000'000;
  if (length < 0 || length > kMax) throw ParseError(r.at("length"), "length out of range");
  if (horizon < 0 || horizon > kMax) throw ParseError(r.at("horizon"), "horizon out of range");
  if (reps < 0 || reps > 10'000) throw ParseError(r.at("repetitions"), "repetitions out of range");
  c.horizon = static_cast<int>(horizon);
  c.repetitions = static_cast<int>(reps);
  c.threshold = r.real("threshold");
  c.reference = r.has("reference") ? r.string("reference") : "sdar:12:3";
  if (r.has("prerequisites")) {
    const auto& pre = r.member("prerequisites");
    if (!pre.is_array()) throw ParseError(r.at("prerequisites"), "expected an array of ids");
    for (std::size_t i = 0; i < pre.size(); ++i) {
      if (!pre[i].is_string())
        throw ParseError(r.at("prerequisites") + "/" + std::to_string(i), "expected a string id");
      c.prerequisites.push_back(pre[i].get<std::string>());
    }
  }
  c.spec.id = c.id;
  c.spec.length = static_cast<int>(length);
  const auto& comps = r.member("components");
  if (!comps.is_array()) throw ParseError(r.at("components"), "expected an array");
  for (std::size_t i = 0; i < comps.size(); ++i)
    c.spec.components.push_back(parse_component(comps[i], r.at("components") + "/" + std::to_string(i)));
  return c;
}

json challenge_json(const Challenge& c) {
  json j;
  j["id"] = c.id;
  j["title"] = c.title;
  j["length"] = c.spec.length;
  j["horizon"] = c.horizon;
  j["repetitions"] = c.repetitions;
  j["prerequisites"] = c.prerequisites;
  j["threshold"] = c.threshold;
  j["reference"] = c.reference;
  auto comps = json::array();
  for (const auto& comp : c.spec.components) comps.push_back(component_json(comp));
  j["components"] = std::move(comps);
  return j;
}

std::map<std::string, std::size_t> index_by_id(const Suite& suite) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < suite.challenges.size(); ++i) index.emplace(suite.challenges[i].id, i);
  return index;
}

void check_acyclic(const Suite& suite, const std::map<std::string, std::size_t>& index) {
  enum class Mark { kNone, kActive, kDone };
  std::vector<Mark> mark(suite.challenges.size(), Mark::kNone);
  std::vector<std::size_t> stack;

  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    mark[i] = Mark::kActive;
    stack.push_back(i);
    for (const auto& pre : suite.challenges[i].prerequisites) {
      const auto j = index.at(pre);
      if (mark[j] == Mark::kActive) {
        const auto start = std::find(stack.begin(), stack.end(), j);
        std::vector<std::string> cycle;
        for (auto it = start; it != stack.end(); ++it) cycle.push_back(suite.challenges[*it].id);
        throw CyclicPrerequisitesError(std::move(cycle));
      }
      if (mark[j] == Mark::kNone) visit(j);
    }
    stack.pop_back();
    mark[i] = Mark::kDone;
  };
  for (std::size_t i = 0; i < suite.challenges.size(); ++i)
    if (mark[i] == Mark::kNone) visit(i);
}

}  // namespace

const Challenge* Suite::find(std::string_view id) const noexcept {
  for (const auto& c : challenges)
    if (c.id == id) return &c;
  return nullptr;
}

void validate_suite(const Suite& suite) {
  if (suite.schema_version != kSuiteSchemaVersion)
    throw Error(ErrorCode::kInvalidSpec, "unsupported schema_version " + std::to_string(suite.schema_version));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < suite.challenges.size(); ++i) {
    const auto& c = suite.challenges[i];
    if (c.id.empty()) throw Error(ErrorCode::kInvalidSpec, "challenge " + std::to_string(i) + " has an empty id");
    if (!index.emplace(c.id, i).second) throw Error(ErrorCode::kInvalidSpec, "duplicate challenge id " + c.id);
  }
  for (const auto& c : suite.challenges) {
    if (c.spec.id != c.id) throw Error(ErrorCode::kInvalidSpec, c.id + ": generator id does not match");
    if (c.repetitions < 1) throw Error(ErrorCode::kInvalidSpec, c.id + ": repetitions must be >= 1");
    if (!(c.threshold > 0.0) || !std::isfinite(c.threshold))
      throw Error(ErrorCode::kInvalidSpec, c.id + ": threshold must be positive");
    if (c.horizon <= 0 || 2LL * c.horizon >= c.spec.length)
      throw Error(ErrorCode::kInvalidSpec, c.id + ": horizon must satisfy 0 < horizon < length/2");
    for (const auto& pre : c.prerequisites)
      if (!index.contains(pre))
        throw Error(ErrorCode::kInvalidSpec, c.id + ": unknown prerequisite " + pre);
    try {
      validate(c.spec);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidSpec, c.id + ": " + e.what());
    }
  }
  check_acyclic(suite, index);
  for (std::size_t i = 0; i < suite.challenges.size(); ++i) {
    const auto& c = suite.challenges[i];
    for (const auto& pre : c.prerequisites) {
      const auto& p = suite.challenges[index.at(pre)];
      if (index.at(pre) > i)
        throw Error(ErrorCode::kInvalidSpec, c.id + " is listed before its prerequisite " + pre);
      if (p.spec.components.size() > c.spec.components.size())
        throw Error(ErrorCode::kInvalidSpec,
                    c.id + " has fewer components than its prerequisite " + pre);
    }
  }
}

Suite load_suite(std::string_view document) {
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  } catch (const json::exception& e) {
    throw ParseError("byte 0", e.what());
  }
  const Reader r(root, "");
  r.only({"schema_version", "base_seed", "challenges"});
  Suite suite;
  const auto version = r.integer("schema_version");
  if (version != kSuiteSchemaVersion)
    throw ParseError("/schema_version", "unsupported schema version " + std::to_string(version));
  suite.schema_version = static_cast<int>(version);
  suite.base_seed = r.has("base_seed") ? r.unsigned_integer("base_seed") : 0;
  const auto& list = r.member("challenges");
  if (!list.is_array()) throw ParseError("/challenges", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i)
    suite.challenges.push_back(parse_challenge(list[i], "/challenges/" + std::to_string(i)));
  validate_suite(suite);
  return suite;
}

std::string serialize_suite(const Suite& suite) {
  json j;
  j["schema_version"] = suite.schema_version;
  j["base_seed"] = suite.base_seed;
  auto list = json::array();
  for (const auto& c : suite.challenges) list.push_back(challenge_json(c));
  j["challenges"] = std::move(list);
  return j.dump(2) + "\n";
}

const Suite& builtin_suite() {
  static const Suite suite = load_suite(detail::kBuiltinSuiteJson);
  return suite;
}

std::vector<std::string> transitive_prerequisites(const Suite& suite, std::string_view id) {
  std::set<std::string> seen;
  std::vector<std::string> frontier;
  if (const auto* c = suite.find(id)) frontier = c->prerequisites;
  while (!frontier.empty()) {
    auto next = std::move(frontier.back());
    frontier.pop_back();
    if (!seen.insert(next).second) continue;
    if (const auto* c = suite.find(next))
      frontier.insert(frontier.end(), c->prerequisites.begin(), c->prerequisites.end());
  }
  return {seen.begin(), seen.end()};
}

std::vector<PlanEntry> execution_plan(const Suite& suite,
                                      const std::map<std::string, Status>& completed) {
  const auto index = index_by_id(suite);
  std::vector<int> indegree(suite.challenges.size(), 0);
  std::vector<std::vector<std::size_t>> dependents(suite.challenges.size());
  for (std::size_t i = 0; i < suite.challenges.size(); ++i) {
    for (const auto& pre : suite.challenges[i].prerequisites) {
      ++indegree[i];
      dependents[index.at(pre)].push_back(i);
    }
  }
  using Item = std::pair<std::string, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::size_t i = 0; i < suite.challenges.size(); ++i)
    if (indegree[i] == 0) ready.emplace(suite.challenges[i].id, i);

  std::vector<PlanEntry> plan;
  plan.reserve(suite.challenges.size());
  while (!ready.empty()) {
    const auto [id, i] = ready.top();
    ready.pop();
    bool skip = false;
    for (const auto& pre : transitive_prerequisites(suite, id)) {
      const auto it = completed.find(pre);
      if (it != completed.end() && blocks_dependents(it->second)) {
        skip = true;
        break;
      }
    }
    plan.push_back({id, skip ? PlanAction::kSkip : PlanAction::kRun});
    for (auto d : dependents[i])
      if (--indegree[d] == 0) ready.emplace(suite.challenges[d].id, d);
  }
  return plan;
}

std::vector<std::vector<std::string>> depth_levels(const Suite& suite) {
  std::map<std::string, int> depth;
  std::vector<std::vector<std::string>> levels;
  // Suites are topologically ordered, so one forward pass suffices.
  for (const auto& c : suite.challenges) {
    int d = 0;
    for (const auto& pre : c.prerequisites) d = std::max(d, depth.at(pre) + 1);
    depth[c.id] = d;
    if (levels.size() <= static_cast<std::size_t>(d)) levels.resize(static_cast<std::size_t>(d) + 1);
    levels[static_cast<std::size_t>(d)].push_back(c.id);
  }
  for (auto& level : levels) std::sort(level.begin(), level.end());
  return levels;
}

std::uint64_t repetition_seed(std::uint64_t base_seed, std::string_view challenge_id, int rep) {
  return rng::derive(rng::derive(base_seed, rng::fnv1a64(challenge_id)), static_cast<std::uint64_t>(rep));
}

}  // namespace fgym
