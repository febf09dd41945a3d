#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fgym/challenges.hpp"
#include "fgym/error.hpp"
#include "fgym/harness.hpp"
#include "fgym/report.hpp"
#include "fgym/version.hpp"

namespace fgym::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Suite read_suite(const std::string& path) {
  if (path.empty()) return builtin_suite();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read suite file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return load_suite(buf.str());
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 10);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(origin + " must be a non-negative integer, got \"" + text + "\"");
  }
}

std::uint64_t resolve_seed(const std::optional<std::string>& flag, const Suite& suite) {
  if (flag) return parse_seed(*flag, "--seed");
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0')
    return parse_seed(env, kSeedEnvVar);
  return suite.base_seed;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + path);
  file << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"forecast-gym: test forecasting pipelines against synthetic series with exact oracles", "fgym"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a forecaster through the challenge suite");
  std::string forecaster;
  std::string suite_path;
  std::optional<std::string> seed_flag;
  bool no_gating = false;
  bool keep_all = false;
  std::string out_dir = "fgym-out";
  int parallel = 1;
  run_cmd->add_option("--forecaster", forecaster,
                      "Built-in name (naive, mean, seasonal_naive:P, ols_trend, knn:W:K, sdar:P:O) "
                      "or \"cmd: <command line>\" for a protocol v1 child process")
      ->required();
  run_cmd->add_option("--suite", suite_path, "Suite definition file (default: builtin suite)");
  run_cmd->add_option("--seed", seed_flag, std::string("Base seed (default: $") + kSeedEnvVar + ", then the suite's base_seed)");
  run_cmd->add_flag("--no-gating", no_gating, "Run every challenge even when prerequisites failed");
  run_cmd->add_flag("--keep-all", keep_all, "Persist artifacts for PASSed challenges too");
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--parallel", parallel, "Worker count")->check(CLI::PositiveNumber)->capture_default_str();

  // list-challenges
  auto* list_cmd = app.add_subcommand("list-challenges", "List the challenges of a suite in plan order");
  std::string list_suite;
  list_cmd->add_option("--suite", list_suite, "Suite definition file (default: builtin suite)");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Export one realization of a challenge as CSV or JSON");
  std::string gen_suite;
  std::string gen_challenge;
  std::optional<std::string> gen_seed;
  std::string gen_out;
  std::string gen_format = "csv";
  gen_cmd->add_option("--challenge", gen_challenge, "Challenge id")->required();
  gen_cmd->add_option("--seed", gen_seed, "Generation seed");
  gen_cmd->add_option("--out", gen_out, "Output file (default: standard output)");
  gen_cmd->add_option("--format", gen_format, "csv (t,observed,oracle) or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  gen_cmd->add_option("--suite", gen_suite, "Suite definition file (default: builtin suite)");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Recompute thresholds from each challenge's reference forecaster");
  std::string cal_suite;
  int cal_seeds = kCalibrationSeeds;
  int cal_parallel = 1;
  bool cal_write = false;
  std::string cal_out;
  cal_cmd->add_option("--suite", cal_suite, "Suite definition file")->required();
  cal_cmd->add_option("--seeds", cal_seeds, "Calibration seeds per challenge")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cal_cmd->add_option("--parallel", cal_parallel, "Worker count")->check(CLI::PositiveNumber);
  cal_cmd->add_flag("--write", cal_write, "Rewrite the suite file with the new thresholds");
  cal_cmd->add_option("--out", cal_out, "Write the calibrated suite here instead");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (*run_cmd) {
      RunConfig config;
      config.suite = read_suite(suite_path);
      config.forecaster = forecaster;
      try {
        config.factory = resolve_forecaster(forecaster, config.timeouts);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      config.base_seed = resolve_seed(seed_flag, config.suite);
      config.gating = no_gating ? Gating::kOff : Gating::kAuto;
      config.keep_all = keep_all;
      config.parallelism = parallel;
      config.output_dir = out_dir;
      const auto report = fgym::run(config);
      report::write_summary(report, config.output_dir, out);
      report::write_artifacts(report, config.output_dir, config.keep_all);
      return exit_status(report);
    }

    if (*list_cmd) {
      const auto suite = read_suite(list_suite);
      for (const auto& entry : execution_plan(suite, {})) {
        const auto& c = *suite.find(entry.id);
        out << std::left << std::setw(30) << c.id << " length=" << c.spec.length << " horizon=" << c.horizon
            << " reps=" << c.repetitions << " threshold=" << report::format_smape(c.threshold);
        if (!c.prerequisites.empty()) {
          out << " after=";
          for (std::size_t i = 0; i < c.prerequisites.size(); ++i) out << (i ? "," : "") << c.prerequisites[i];
        }
        out << '\n';
      }
      return kExitOk;
    }

    if (*gen_cmd) {
      const auto suite = read_suite(gen_suite);
      const auto* c = suite.find(gen_challenge);
      if (c == nullptr) throw UsageError("unknown challenge \"" + gen_challenge + "\"");
      const auto seed = resolve_seed(gen_seed, suite);
      const auto pair = generate(c->spec, seed);
      write_text(gen_out, gen_format == "json" ? to_json(pair) + "\n" : to_csv(pair), out);
      return kExitOk;
    }

    if (*cal_cmd) {
      const auto suite = read_suite(cal_suite);
      const auto rows = calibrate(suite, cal_seeds, cal_parallel);
      out << std::left << std::setw(30) << "challenge" << std::setw(16) << "reference" << std::setw(12) << "p95"
          << "threshold\n";
      for (const auto& row : rows)
        out << std::left << std::setw(30) << row.id << std::setw(16) << row.reference << std::setw(12)
            << report::format_smape(row.p95) << format_real(row.threshold) << '\n';
      const auto calibrated = serialize_suite(with_thresholds(suite, rows));
      if (cal_write) write_text(cal_suite, calibrated, out);
      else if (!cal_out.empty()) write_text(cal_out, calibrated, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "fgym: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "fgym: " << e.what() << '\n';
    return kExitFailures;
  }
  return kExitUsage;
}

}  // namespace fgym::cli
