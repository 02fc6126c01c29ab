#include "drsplit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace drs {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColours[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string convergence_svg(const std::vector<PlotSeries>& series,
                            const std::optional<GuideLine>& guide, const std::string& title) {
  double kmin = std::numeric_limits<double>::infinity();
  double kmax = -kmin;
  double ymin = kmin;
  double ymax = -kmin;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double v = s.values[i];
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      const double k = static_cast<double>(s.k0 + i);
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
      ymin = std::min(ymin, std::log10(v));
      ymax = std::max(ymax, std::log10(v));
    }
  }
  if (!std::isfinite(kmin)) {
    kmin = 0.0;
    kmax = 1.0;
    ymin = -1.0;
    ymax = 0.0;
  }
  if (kmax == kmin) kmax = kmin + 1.0;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax = ymin + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double k) { return kLeft + (k - kmin) / (kmax - kmin) * pw; };
  auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
       << escape(title) << "</text>\n";
  }
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\"/>\n</g>\n";
  os << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const double ystep = std::max(1.0, std::ceil((ymax - ymin) / 8.0));
  for (double ly = ymin; ly <= ymax + 1e-9; ly += ystep) {
    os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << fmt(py(ly))
       << "\" y2=\"" << fmt(py(ly)) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(ly) + 4)
       << "\" text-anchor=\"end\">1e" << static_cast<int>(ly) << "</text>\n";
  }
  os << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop + ph + 18) << "\">" << kmin << "</text>\n";
  os << "<text x=\"" << fmt(kLeft + pw) << "\" y=\"" << fmt(kTop + ph + 18)
     << "\" text-anchor=\"end\">" << kmax << "</text>\n";
  os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 12)
     << "\" text-anchor=\"middle\">k</text>\n</g>\n";

  std::size_t legend = 0;
  auto legend_entry = [&](const std::string& label, const std::string& colour, bool dashed) {
    const double y = kTop + 14.0 + 18.0 * static_cast<double>(legend++);
    const double x = kLeft + pw + 12.0;
    os << "<line x1=\"" << x << "\" x2=\"" << x + 22 << "\" y1=\"" << y << "\" y2=\"" << y
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\""
       << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << x + 28 << "\" y=\"" << y + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(label) << "</text>\n";
  };

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const std::string colour = kColours[si % std::size(kColours)];
    os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << colour
       << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double v = s.values[i];
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      if (!first) os << ' ';
      first = false;
      os << fmt(px(static_cast<double>(s.k0 + i))) << ',' << fmt(py(std::log10(v)));
    }
    os << "\"/>\n";
    legend_entry(s.label, colour, false);
  }

  if (guide && guide->rate > 0.0 && guide->value_anchor > 0.0) {
    // Clip the guide to the plotted value range.
    const double slope = std::log10(guide->rate);
    const double k_a = static_cast<double>(guide->k_anchor);
    const double y_a = std::log10(guide->value_anchor);
    double k_end = kmax;
    if (slope < 0.0) k_end = std::min(kmax, k_a + (ymin - y_a) / slope);
    const double k_start = std::max(kmin, k_a);
    if (k_end <= k_start) k_end = kmax;
    {
      os << "<line class=\"guide\" x1=\"" << fmt(px(k_start)) << "\" y1=\""
         << fmt(py(y_a + slope * (k_start - k_a))) << "\" x2=\"" << fmt(px(k_end)) << "\" y2=\""
         << fmt(py(y_a + slope * (k_end - k_a)))
         << "\" stroke=\"magenta\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
    }
    legend_entry(guide->label.empty() ? "rate " + fmt(guide->rate) : guide->label, "magenta", true);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace drs
