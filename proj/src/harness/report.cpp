#include "rsi/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace rsi::harness {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string spectral_csv(const SpectralEstimate& se) {
  std::string out = std::string(kSpectralHeader) + "\n";
  for (std::size_t i = 0; i < se.values.size(); ++i) {
    const Vec3& g = se.grid->nodes[i];
    out += num(g.x()) + "," + num(g.y()) + "," + num(g.z()) + "," +
           num(se.values[i].real()) + "," + num(se.values[i].imag()) + "\n";
  }
  return out;
}

std::string reconstruction_csv(const Reconstruction& rec) {
  std::string out = std::string(kReconstructionHeader) + "\n";
  for (std::size_t p = 0; p < rec.points.size(); ++p) {
    const Vec3& x = rec.points[p];
    out += num(x.x()) + "," + num(x.y()) + "," + num(x.z()) + "," +
           num(rec.values[p].real()) + "," + num(rec.values[p].imag()) + "," +
           (rec.truth.empty() ? std::string() : num(rec.truth[p])) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    out += num(r.eps_or_n) + "," + num(r.M) + "," + num(r.rho) + "," +
           num(r.t) + "," + num(r.sup_error) + "," + num(r.l2_error) + "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit fit;
  fit.n = x.size();
  if (x.size() != y.size()) {
    fit.status = "x and y lengths differ";
    return fit;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      fit.status = "non-finite sample";
      return fit;
    }
  }
  if (fit.n < 2) {
    fit.status = "fewer than two points";
    return fit;
  }
  const double n = static_cast<double>(fit.n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    fit.status = "zero variance in the abscissa";
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.ok = true;
  fit.status = "ok";
  if (fit.n < 3) {
    fit.ci_low = -std::numeric_limits<double>::infinity();
    fit.ci_high = std::numeric_limits<double>::infinity();
    fit.stderr_slope = std::numeric_limits<double>::infinity();
    return fit;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.slope - q * fit.stderr_slope;
  fit.ci_high = fit.slope + q * fit.stderr_slope;
  return fit;
}

std::string svg_line_chart(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<Series>& series, bool log_x,
                           bool log_y) {
  constexpr double W = 640, H = 420, L = 70, Rm = 20, T = 40, B = 55;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double xv, double yv) {
    return std::isfinite(xv) && std::isfinite(yv) && (!log_x || xv > 0.0) &&
           (!log_y || yv > 0.0);
  };

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.03 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - Rm); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape_xml(title) + "</text>\n";
  o += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" +
       num(W - L - Rm) + "\" height=\"" + num(H - T - B) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = L + (W - L - Rm) * i / 4.0, sy = H - B - (H - T - B) * i / 4.0;
    o += "<text x=\"" + num(sx) + "\" y=\"" + num(H - B + 16) +
         "\" text-anchor=\"middle\">" + short_num(log_x ? std::pow(10.0, fx) : fx) +
         "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(sy + 4) +
         "\" text-anchor=\"end\">" + short_num(log_y ? std::pow(10.0, fy) : fy) +
         "</text>\n";
  }
  o += "<text x=\"320\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" +
       escape_xml(xlabel) + "</text>\n";
  o += "<text x=\"16\" y=\"" + num((H - B + T) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((H - B + T) / 2) + ")\">" + escape_xml(ylabel) + "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!usable(series[s].x[i], series[s].y[i])) continue;
      pts += short_num(px(series[s].x[i])) + "," + short_num(py(series[s].y[i])) + " ";
      o += "<circle cx=\"" + short_num(px(series[s].x[i])) + "\" cy=\"" +
           short_num(py(series[s].y[i])) + "\" r=\"2.5\" fill=\"" + c + "\"/>\n";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(c) +
         "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    o += "<text x=\"" + num(L + 10) + "\" y=\"" + num(T + 16 + 14.0 * s) +
         "\" fill=\"" + c + "\">" + escape_xml(series[s].name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace rsi::harness
