#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include "json.hpp"

#include "../support/fixtures.hpp"
#include "fgym/error.hpp"
#include "fgym/report.hpp"

namespace {

using namespace fgym;
using namespace fgym::report;

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fgym_report_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

const RunReport& knn_report() {
  static const RunReport report = [] {
    RunConfig config;
    config.suite = builtin_suite();
    config.forecaster = "knn:12:5";
    return run(config);
  }();
  return report;
}

RepetitionArtifact artifact_with(std::vector<Observation> observed, std::vector<double> oracle, int n_train,
                                 std::vector<double> forecast) {
  RepetitionArtifact a;
  const auto cut = static_cast<std::ptrdiff_t>(n_train);
  a.train.observed.assign(observed.begin(), observed.begin() + cut);
  a.test.observed.assign(observed.begin() + cut, observed.end());
  a.train.oracle.assign(oracle.begin(), oracle.begin() + cut);
  a.test.oracle.assign(oracle.begin() + cut, oracle.end());
  a.forecast = std::move(forecast);
  return a;
}

std::string path_d(const std::string& svg, const std::string& cls) {
  const std::regex re("class=\"" + cls + "\" d=\"([^\"]*)\"");
  std::smatch m;
  return std::regex_search(svg, m, re) ? m[1].str() : std::string("<none>");
}

TEST(Summary, CsvHasOneRowPerChallengeWithVerbatimStatuses) {
  const auto csv = summary_csv(knn_report());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "challenge_id,mean_smape,status");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto& o = knn_report().outcomes[rows];
    const auto last = line.substr(line.rfind(',') + 1);
    EXPECT_EQ(last, to_string(o.result.status));
    EXPECT_EQ(line.rfind(o.result.challenge_id + ",", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, builtin_suite().challenges.size());
}

TEST(Summary, EmptyReportIsHeaderOnly) {
  RunReport empty;
  EXPECT_EQ(summary_csv(empty), "challenge_id,mean_smape,status\n");
  EXPECT_EQ(summary_line(empty), "forecast-gym : 0 PASS, 0 FAIL, 0 SKIP, 0 ERROR (exit 0)");
}

TEST(Summary, WriteSummaryIsDeterministicAndPrintsTheLine) {
  const auto dir = scratch_dir("summary");
  std::ostringstream out1, out2;
  write_summary(knn_report(), dir, out1);
  const auto json1 = slurp(dir / "report.json");
  const auto csv1 = slurp(dir / "summary.csv");
  write_summary(knn_report(), dir, out2);
  EXPECT_EQ(slurp(dir / "report.json"), json1);
  EXPECT_EQ(slurp(dir / "summary.csv"), csv1);
  EXPECT_EQ(out1.str(), summary_line(knn_report()) + "\n");
  EXPECT_NE(out1.str().find("(exit 1)"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Summary, ReportJsonSchema) {
  const auto j = nlohmann::json::parse(report_json(knn_report()));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["tool"]["name"], "forecast-gym");
  EXPECT_EQ(j["config"]["forecaster"], "knn:12:5");
  EXPECT_EQ(j["config"]["gating"], "AUTO");
  EXPECT_EQ(j["results"].size(), builtin_suite().challenges.size());
  EXPECT_TRUE(j.contains("execution"));
  EXPECT_FALSE(nlohmann::json::parse(report_body_json(knn_report())).contains("execution"));
  for (const auto& r : j["results"]) {
    if (r["status"] == "SKIP") {
      EXPECT_TRUE(r["mean_smape"].is_null());
      EXPECT_TRUE(r["repetitions"].empty());
    } else if (r["status"] == "PASS" || r["status"] == "FAIL") {
      EXPECT_EQ(r["repetitions"].size(), 3u);
      EXPECT_EQ(r["repetitions"][0]["forecast"].size(), r["repetitions"][0]["test_oracle"].size());
    }
  }
  EXPECT_EQ(j["summary"]["exit_status"], 1);
}

TEST(Summary, UnwritableDirectoryIsIoError) {
  const auto file = scratch_dir("blocker");
  std::ofstream(file) << "x";
  std::ostringstream out;
  try {
    write_summary(knn_report(), file / "sub", out);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::filesystem::remove(file);
}

TEST(Format, RoundsHalfToEvenOnExactBinaryValues) {
  EXPECT_EQ(format_smape(0.125), "0.12");
  EXPECT_EQ(format_smape(0.375), "0.38");
  EXPECT_EQ(format_smape(2.675), "2.67");  // 2.67499999... in binary
  EXPECT_EQ(format_smape(9.523809523809524), "9.52");
  EXPECT_EQ(format_smape(200), "200.00");
}

TEST(Bands, BoundariesMatchThePassRule) {
  EXPECT_EQ(band_for(10, 10), Band::kPass);
  EXPECT_EQ(band_for(10.0001, 10), Band::kWarn);
  EXPECT_EQ(band_for(20, 10), Band::kWarn);
  EXPECT_EQ(band_for(20.0001, 10), Band::kFail);
  EXPECT_EQ(fill_for(Band::kPass), "#8bc34a");
  EXPECT_EQ(fill_for(Band::kWarn), "#ffb300");
  EXPECT_EQ(fill_for(Band::kFail), "#e53935");
}

TEST(Matrix, ShapeAndConventions) {
  RunConfig config;
  config.suite = builtin_suite();
  config.forecaster = "sdar:12:3";
  config.gating = Gating::kOff;
  const auto full = run(config);
  const auto svg = render_matrix(full);
  EXPECT_NE(svg.find("viewBox=\"0 0 960 480\""), std::string::npos);
  EXPECT_EQ(count(svg, "<g class=\"row\""), 12u);
  EXPECT_EQ(count(svg, "class=\"cell\""), 36u);

  const auto gated = render_matrix(knn_report());
  std::size_t skips = 0;
  for (const auto& o : knn_report().outcomes) skips += o.result.status == Status::kSkip;
  EXPECT_EQ(count(gated, "class=\"skip\""), skips);
  EXPECT_EQ(count(gated, "fill=\"url(#hatch)\""), skips);
  // A SKIP row carries no sMAPE number.
  const auto skip_row = gated.find("data-status=\"SKIP\"");
  ASSERT_NE(skip_row, std::string::npos);
  const auto row_end = gated.find("</g>", skip_row);
  EXPECT_EQ(gated.substr(skip_row, row_end - skip_row).find("class=\"smape\""), std::string::npos);
}

TEST(Matrix, PrintedValuesAndColorsFollowTheReport) {
  const auto svg = render_matrix(knn_report());
  for (const auto& o : knn_report().outcomes) {
    for (const auto& s : o.result.rep_scores) {
      EXPECT_NE(svg.find(">" + format_smape(s.smape) + "</text>"), std::string::npos);
      EXPECT_NE(svg.find(std::string(fill_for(band_for(s.smape, o.result.threshold)))), std::string::npos);
    }
  }
  EXPECT_EQ(svg, render_matrix(knn_report()));
}

TEST(Panel, ForecastEqualToOracleSharesCoordinates) {
  const auto a = artifact_with({1.0, 2.0, 3.0, 4.0, 5.0}, {1, 2, 3, 4, 5}, 3, {4, 5});
  const auto svg = render_panel("x", a, 0.0);
  const auto oracle = path_d(svg, "oracle");
  const auto forecast = path_d(svg, "forecast");
  EXPECT_EQ(oracle, "M0 1 L1 2 L2 3 L3 4 L4 5");
  EXPECT_EQ(forecast, "M3 4 L4 5");
  EXPECT_NE(oracle.find(forecast.substr(1)), std::string::npos);
  EXPECT_NE(svg.find("sMAPE 0.00"), std::string::npos);
}

TEST(Panel, MissingObservationsLeaveGaps) {
  const auto a = artifact_with({1.0, std::nullopt, 3.0, 4.0, std::nullopt, 6.0}, {1, 2, 3, 4, 5, 6}, 4, {5, 6});
  EXPECT_EQ(path_d(render_panel("x", a), "observed"), "M0 1 M2 3 L3 4 M5 6");
}

TEST(Panel, DividerAtTrainLengthAndAxesLabeled) {
  const auto a = artifact_with({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, {1, 2, 3, 4, 5, 6, 7}, 5, {6, 7});
  const auto svg = render_panel("x", a);
  EXPECT_NE(svg.find("class=\"divider\" x1=\"5\""), std::string::npos);
  EXPECT_NE(svg.find("x2=\"5\""), std::string::npos);
  EXPECT_NE(svg.find(">t</text>"), std::string::npos);
  EXPECT_NE(svg.find(">value</text>"), std::string::npos);
  EXPECT_EQ(svg, render_panel("x", a));
}

TEST(Artifacts, WrittenForFailuresAndForPassesOnlyWithKeepAll) {
  const auto dir = scratch_dir("artifacts");
  write_artifacts(knn_report(), dir, false);
  EXPECT_TRUE(std::filesystem::exists(dir / "matrix.svg"));
  for (const auto& o : knn_report().outcomes) {
    const bool expect = o.result.status == Status::kFail;
    EXPECT_EQ(std::filesystem::exists(dir / o.result.challenge_id / "rep0" / "panel.svg"), expect)
        << o.result.challenge_id;
    if (expect) {
      const auto csv = slurp(dir / o.result.challenge_id / "rep2" / "series.csv");
      EXPECT_EQ(csv.rfind("t,segment,observed,oracle,forecast\n", 0), 0u);
    }
  }
  const auto keep = scratch_dir("keep");
  write_artifacts(knn_report(), keep, true);
  for (const auto& o : knn_report().outcomes)
    if (o.result.status == Status::kPass)
      EXPECT_TRUE(std::filesystem::exists(keep / o.result.challenge_id / "rep0" / "panel.svg"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(keep);
}

TEST(Artifacts, SeriesCsvMarksSegments) {
  const auto a = artifact_with({1.0, std::nullopt, 3.0, 4.0}, {1, 2, 3, 4}, 2, {3.5, 4.5});
  EXPECT_EQ(artifact_csv(a),
            "t,segment,observed,oracle,forecast\n"
            "0,train,1,1,\n"
            "1,train,,2,\n"
            "2,test,3,3,3.5\n"
            "3,test,4,4,4.5\n");
}

}  // namespace
