#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgym/report.hpp"

namespace fgym::report {

namespace {

constexpr int kWidth = 960;
constexpr int kRowHeight = 40;
constexpr int kLabelWidth = 300;
constexpr int kGlyphWidth = 120;
constexpr int kCellGap = 4;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view glyph(Status s) {
  switch (s) {
    case Status::kPass: return "✓ PASS";
    case Status::kFail: return "✗ FAIL";
    case Status::kSkip: return "– SKIP";
    case Status::kError: return "! ERROR";
  }
  return "?";
}

std::string num(double v) { return format_real(v); }

}  // namespace

std::string render_matrix(const RunReport& report) {
  const int rows = static_cast<int>(report.outcomes.size());
  const int height = kRowHeight * rows;
  std::size_t max_reps = 1;
  for (const auto& o : report.outcomes)
    max_reps = std::max(max_reps, std::max(o.result.rep_scores.size(), o.artifacts.size()));
  const int cells_width = kWidth - kLabelWidth - kGlyphWidth;
  const int cell_width = cells_width / static_cast<int>(max_reps);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"14\">\n"
      << "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\""
      << kTheme.hatch_stroke << "\" stroke-width=\"3\"/></pattern></defs>\n";

  for (int r = 0; r < rows; ++r) {
    const auto& o = report.outcomes[static_cast<std::size_t>(r)];
    const auto& res = o.result;
    const int y = r * kRowHeight;
    svg << "<g class=\"row\" data-challenge=\"" << escape(res.challenge_id) << "\" data-status=\""
        << to_string(res.status) << "\">\n";
    svg << "<text class=\"label\" x=\"8\" y=\"" << y + 25 << "\" fill=\"" << kTheme.text_fill << "\">"
        << escape(res.challenge_id) << "</text>\n";
    if (res.status == Status::kSkip) {
      svg << "<rect class=\"skip\" x=\"" << kLabelWidth << "\" y=\"" << y + kCellGap << "\" width=\""
          << cells_width - kCellGap << "\" height=\"" << kRowHeight - 2 * kCellGap
          << "\" fill=\"url(#hatch)\" stroke=\"" << kTheme.hatch_stroke << "\"/>\n";
    } else if (res.status == Status::kError) {
      svg << "<rect class=\"error\" x=\"" << kLabelWidth << "\" y=\"" << y + kCellGap << "\" width=\""
          << cells_width - kCellGap << "\" height=\"" << kRowHeight - 2 * kCellGap << "\" fill=\""
          << kTheme.error_fill << "\"/>\n";
    } else {
      for (std::size_t k = 0; k < res.rep_scores.size(); ++k) {
        const double s = res.rep_scores[k].smape;
        const int x = kLabelWidth + static_cast<int>(k) * cell_width;
        svg << "<rect class=\"cell\" data-rep=\"" << k << "\" x=\"" << x << "\" y=\"" << y + kCellGap
            << "\" width=\"" << cell_width - kCellGap << "\" height=\"" << kRowHeight - 2 * kCellGap
            << "\" fill=\"" << fill_for(band_for(s, res.threshold)) << "\"/>\n";
        svg << "<text class=\"smape\" x=\"" << x + (cell_width - kCellGap) / 2 << "\" y=\"" << y + 25
            << "\" text-anchor=\"middle\" fill=\"" << kTheme.text_fill << "\">" << format_smape(s) << "</text>\n";
      }
    }
    svg << "<text class=\"status\" x=\"" << kWidth - kGlyphWidth + 8 << "\" y=\"" << y + 25 << "\" fill=\""
        << kTheme.text_fill << "\">" << glyph(res.status) << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_panel(std::string_view challenge_id, const RepetitionArtifact& a,
                         std::optional<double> smape) {
  constexpr int kPanelWidth = 960;
  constexpr int kPanelHeight = 360;
  constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 40;

  const std::size_t n_train = a.train.size();
  const std::size_t n = n_train + a.test.size();

  std::vector<Observation> observed = a.train.observed;
  observed.insert(observed.end(), a.test.observed.begin(), a.test.observed.end());
  std::vector<double> oracle = a.train.oracle;
  oracle.insert(oracle.end(), a.test.oracle.begin(), a.test.oracle.end());

  double lo = HUGE_VAL;
  double hi = -HUGE_VAL;
  auto extend = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (const auto& v : observed)
    if (v) extend(*v);
  for (double v : oracle) extend(v);
  for (double v : a.forecast) extend(v);
  if (!(lo <= hi)) lo = hi = 0.0;
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double x_max = n > 1 ? static_cast<double>(n - 1) : 1.0;

  const double plot_w = kPanelWidth - kLeft - kRight;
  const double plot_h = kPanelHeight - kTop - kBottom;
  const double sx = plot_w / x_max;
  const double sy = plot_h / (hi - lo);
  const double tx = kLeft;
  const double ty = kTop + plot_h + lo * sy;  // pixel y of value 0

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kPanelWidth << "\" height=\""
      << kPanelHeight << "\" viewBox=\"0 0 " << kPanelWidth << ' ' << kPanelHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text class=\"title\" x=\"" << kLeft << "\" y=\"20\" fill=\"" << kTheme.text_fill << "\">"
      << escape(challenge_id) << " rep " << a.rep;
  if (smape) svg << " sMAPE " << format_smape(*smape);
  svg << "</text>\n";
  svg << "<rect class=\"frame\" x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"" << kTheme.divider_stroke << "\"/>\n";
  svg << "<text class=\"axis-label\" x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kPanelHeight - 8
      << "\" text-anchor=\"middle\">t</text>\n";
  svg << "<text class=\"axis-label\" x=\"14\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 14 "
      << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">value</text>\n";
  svg << "<text class=\"tick\" x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">" << num(hi)
      << "</text>\n";
  svg << "<text class=\"tick\" x=\"" << kLeft - 6 << "\" y=\"" << kTop + plot_h << "\" text-anchor=\"end\">"
      << num(lo) << "</text>\n";
  svg << "<text class=\"tick\" x=\"" << kLeft << "\" y=\"" << kTop + plot_h + 16 << "\">0</text>\n";
  svg << "<text class=\"tick\" x=\"" << kLeft + plot_w << "\" y=\"" << kTop + plot_h + 16
      << "\" text-anchor=\"end\">" << (n > 0 ? n - 1 : 0) << "</text>\n";

  // Everything below is drawn in data coordinates (x = t, y = value).
  svg << "<g class=\"data\" transform=\"matrix(" << num(sx) << " 0 0 " << num(-sy) << ' ' << num(tx) << ' '
      << num(ty) << ")\" fill=\"none\" stroke-width=\"1.5\">\n";

  std::string observed_d;
  bool pen_down = false;
  for (std::size_t t = 0; t < n; ++t) {
    if (!observed[t]) {
      pen_down = false;
      continue;
    }
    observed_d += pen_down ? " L" : (observed_d.empty() ? "M" : " M");
    observed_d += num(static_cast<double>(t)) + ' ' + num(*observed[t]);
    pen_down = true;
  }
  svg << "<path class=\"observed\" d=\"" << observed_d << "\" stroke=\"" << kTheme.observed_stroke
      << "\" vector-effect=\"non-scaling-stroke\"/>\n";

  std::string oracle_d;
  for (std::size_t t = 0; t < n; ++t)
    oracle_d += (t == 0 ? "M" : " L") + num(static_cast<double>(t)) + ' ' + num(oracle[t]);
  svg << "<path class=\"oracle\" d=\"" << oracle_d << "\" stroke=\"" << kTheme.oracle_stroke
      << "\" vector-effect=\"non-scaling-stroke\"/>\n";

  std::string forecast_d;
  for (std::size_t j = 0; j < a.forecast.size(); ++j)
    forecast_d += (j == 0 ? "M" : " L") + num(static_cast<double>(n_train + j)) + ' ' + num(a.forecast[j]);
  svg << "<path class=\"forecast\" d=\"" << forecast_d << "\" stroke=\"" << kTheme.forecast_stroke
      << "\" vector-effect=\"non-scaling-stroke\"/>\n";

  svg << "<line class=\"divider\" x1=\"" << n_train << "\" y1=\"" << num(lo) << "\" x2=\"" << n_train
      << "\" y2=\"" << num(hi) << "\" stroke=\"" << kTheme.divider_stroke
      << "\" stroke-dasharray=\"4 3\" vector-effect=\"non-scaling-stroke\"/>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace fgym::report
