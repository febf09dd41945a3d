#pragma once

// Machine-readable run summaries and SVG diagnostics. Every renderer is a pure
// function of its input; sMAPE values are printed rounded half-to-even to two
// decimals.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "fgym/harness.hpp"

namespace fgym::report {

inline constexpr int kReportSchemaVersion = 1;

struct Theme {
  std::string_view pass_fill = "#8bc34a";    // sMAPE <= threshold
  std::string_view warn_fill = "#ffb300";    // <= 2 x threshold
  std::string_view fail_fill = "#e53935";    // above
  std::string_view error_fill = "#9e9e9e";
  std::string_view hatch_stroke = "#9e9e9e";
  std::string_view observed_stroke = "#bdbdbd";
  std::string_view oracle_stroke = "#212121";
  std::string_view forecast_stroke = "#1e88e5";
  std::string_view divider_stroke = "#757575";
  std::string_view text_fill = "#212121";
};
inline constexpr Theme kTheme{};

enum class Band { kPass, kWarn, kFail };
Band band_for(double smape, double threshold) noexcept;
std::string_view fill_for(Band band) noexcept;

/// "%.2f" under round-half-to-even on the exact binary value.
std::string format_smape(double smape);

/// Full report.json document (schema_version 1).
std::string report_json(const RunReport& report);
/// report.json without the "execution" block (timestamps, parallelism).
std::string report_body_json(const RunReport& report);
/// Header "challenge_id,mean_smape,status"; one row per challenge.
std::string summary_csv(const RunReport& report);
/// e.g. "forecast-gym knn:12:5: 1 PASS, 1 FAIL, 10 SKIP, 0 ERROR (exit 1)"
std::string summary_line(const RunReport& report);

/// Writes report.json and summary.csv into `dir` and prints the summary line
/// to `out`. Throws Error{kIoError}.
void write_summary(const RunReport& report, const std::filesystem::path& dir, std::ostream& out);

/// Matrix of challenges x repetitions, 960 x (40 * rows).
std::string render_matrix(const RunReport& report);

/// Observed (light, gaps at MISSING), oracle (dark), forecast (accent) and
/// a divider at x == train length. Path coordinates are data coordinates.
std::string render_panel(std::string_view challenge_id, const RepetitionArtifact& artifact,
                         std::optional<double> smape = std::nullopt);

/// series.csv with columns t,segment,observed,oracle,forecast.
std::string artifact_csv(const RepetitionArtifact& artifact);

/// matrix.svg plus <dir>/<id>/rep<k>/{series.csv,panel.svg} for FAILed
/// challenges, and for PASSed ones when `keep_all`.
void write_artifacts(const RunReport& report, const std::filesystem::path& dir, bool keep_all);

}  // namespace fgym::report
