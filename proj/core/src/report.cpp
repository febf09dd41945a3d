#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fgym/error.hpp"
#include "fgym/report.hpp"
#include "fgym/version.hpp"
#include "json.hpp"

namespace fgym::report {

namespace {

using nlohmann::json;

json observations(const std::vector<Observation>& values) {
  auto out = json::array();
  for (const auto& v : values) out.push_back(v ? json(*v) : json());
  return out;
}

json result_json(const ChallengeOutcome& outcome) {
  const auto& r = outcome.result;
  json j;
  j["challenge_id"] = r.challenge_id;
  j["status"] = std::string(to_string(r.status));
  j["threshold"] = r.threshold;
  j["mean_smape"] = r.mean_smape ? json(*r.mean_smape) : json();
  j["error_detail"] = r.error_detail ? json(*r.error_detail) : json();
  auto reps = json::array();
  for (std::size_t k = 0; k < outcome.artifacts.size(); ++k) {
    const auto& a = outcome.artifacts[k];
    json rep;
    rep["rep"] = a.rep;
    rep["seed"] = a.seed;
    if (k < r.rep_scores.size()) {
      rep["smape"] = r.rep_scores[k].smape;
      rep["per_step_abs_err"] = r.rep_scores[k].per_step_abs_err;
    }
    rep["params"] = a.train.params;
    rep["train_observed"] = observations(a.train.observed);
    rep["train_oracle"] = a.train.oracle;
    rep["test_observed"] = observations(a.test.observed);
    rep["test_oracle"] = a.test.oracle;
    rep["forecast"] = a.forecast;
    if (a.train.regime_path && a.test.regime_path) {
      auto path = *a.train.regime_path;
      path.insert(path.end(), a.test.regime_path->begin(), a.test.regime_path->end());
      rep["regime_path"] = path;
    } else {
      rep["regime_path"] = nullptr;
    }
    reps.push_back(std::move(rep));
  }
  j["repetitions"] = std::move(reps);
  return j;
}

json body(const RunReport& report) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", kToolName}, {"version", report.tool_version}};
  j["config"] = {{"forecaster", report.forecaster},
                 {"base_seed", report.base_seed},
                 {"gating", report.gating == Gating::kAuto ? "AUTO" : "OFF"},
                 {"keep_all", report.keep_all}};
  auto results = json::array();
  int counts[4] = {0, 0, 0, 0};
  for (const auto& o : report.outcomes) {
    results.push_back(result_json(o));
    ++counts[static_cast<int>(o.result.status)];
  }
  j["results"] = std::move(results);
  j["summary"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"skip", counts[2]}, {"error", counts[3]},
                  {"exit_status", exit_status(report)}};
  return j;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

void make_dirs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

Band band_for(double smape, double threshold) noexcept {
  if (smape <= threshold) return Band::kPass;
  if (smape <= 2.0 * threshold) return Band::kWarn;
  return Band::kFail;
}

std::string_view fill_for(Band band) noexcept {
  switch (band) {
    case Band::kPass: return kTheme.pass_fill;
    case Band::kWarn: return kTheme.warn_fill;
    case Band::kFail: return kTheme.fail_fill;
  }
  return kTheme.fail_fill;
}

std::string format_smape(double smape) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", smape);
  return buf;
}

std::string report_json(const RunReport& report) {
  auto j = body(report);
  j["execution"] = {{"parallelism", report.parallelism},
                    {"started", report.started},
                    {"finished", report.finished}};
  return j.dump(2) + "\n";
}

std::string report_body_json(const RunReport& report) { return body(report).dump(2) + "\n"; }

std::string summary_csv(const RunReport& report) {
  std::string out = "challenge_id,mean_smape,status\n";
  for (const auto& o : report.outcomes) {
    out += o.result.challenge_id;
    out += ',';
    if (o.result.mean_smape) out += format_smape(*o.result.mean_smape);
    out += ',';
    out += to_string(o.result.status);
    out += '\n';
  }
  return out;
}

std::string summary_line(const RunReport& report) {
  int counts[4] = {0, 0, 0, 0};
  for (const auto& o : report.outcomes) ++counts[static_cast<int>(o.result.status)];
  std::ostringstream line;
  line << kToolName << ' ' << report.forecaster << ": " << counts[0] << " PASS, " << counts[1] << " FAIL, "
       << counts[2] << " SKIP, " << counts[3] << " ERROR (exit " << exit_status(report) << ')';
  return line.str();
}

void write_summary(const RunReport& report, const std::filesystem::path& dir, std::ostream& out) {
  make_dirs(dir);
  write_file(dir / "report.json", report_json(report));
  write_file(dir / "summary.csv", summary_csv(report));
  out << summary_line(report) << '\n';
}

std::string artifact_csv(const RepetitionArtifact& a) {
  std::ostringstream out;
  out << "t,segment,observed,oracle,forecast\n";
  const auto n_train = a.train.size();
  for (std::size_t t = 0; t < n_train + a.test.size(); ++t) {
    const bool test = t >= n_train;
    const auto& observed = test ? a.test.observed[t - n_train] : a.train.observed[t];
    const double oracle = test ? a.test.oracle[t - n_train] : a.train.oracle[t];
    out << t << ',' << (test ? "test" : "train") << ',';
    if (observed) out << format_real(*observed);
    out << ',' << format_real(oracle) << ',';
    if (test && t - n_train < a.forecast.size()) out << format_real(a.forecast[t - n_train]);
    out << '\n';
  }
  return out.str();
}

void write_artifacts(const RunReport& report, const std::filesystem::path& dir, bool keep_all) {
  make_dirs(dir);
  write_file(dir / "matrix.svg", render_matrix(report));
  for (const auto& o : report.outcomes) {
    const auto status = o.result.status;
    if (!(status == Status::kFail || (status == Status::kPass && keep_all))) continue;
    for (std::size_t k = 0; k < o.artifacts.size(); ++k) {
      const auto& a = o.artifacts[k];
      const auto rep_dir = dir / o.result.challenge_id / ("rep" + std::to_string(a.rep));
      make_dirs(rep_dir);
      write_file(rep_dir / "series.csv", artifact_csv(a));
      const std::optional<double> s =
          k < o.result.rep_scores.size() ? std::optional<double>(o.result.rep_scores[k].smape) : std::nullopt;
      write_file(rep_dir / "panel.svg", render_panel(o.result.challenge_id, a, s));
    }
  }
}

}  // namespace fgym::report
