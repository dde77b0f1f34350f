#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rsi/harness/report.hpp"

using namespace rsi;
using namespace rsi::harness;

namespace {

std::string golden(const std::string& name) {
  std::ifstream f(std::string(RSI_TEST_DATA_DIR) + "/" + name);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Reconstruction two_points() {
  Reconstruction rec;
  rec.points = {Vec3(0.0, 0.1, -0.5), Vec3(0.25, 0.0, 0.0)};
  rec.values = {Complex(0.75, 0.0), Complex(-0.125, 3e-17)};
  return rec;
}

}  // namespace

TEST_CASE("CSV schemas match the golden files") {
  auto grid = std::make_shared<FrequencyGrid>();
  grid->nodes = {Vec3(0.5, 0.0, -0.25), Vec3(-0.5, 0.0, 0.25)};
  SpectralEstimate se;
  se.grid = grid;
  se.values = {Complex(1.5, -2.0), Complex(0.1, 1e-20)};
  CHECK(spectral_csv(se) == golden("golden_spectral.csv"));

  Reconstruction rec = two_points();
  CHECK(reconstruction_csv(rec) == golden("golden_reconstruction_notruth.csv"));
  rec.truth = {1.0, 0.0};
  CHECK(reconstruction_csv(rec) == golden("golden_reconstruction.csv"));

  const std::vector<SweepRow> rows = {{1e-5, 1e-5, 9.5, 0.0, 0.125, 0.0625},
                                      {100.0, 0.02, 4.0, 1.0, 0.5, 0.25}};
  CHECK(sweep_csv(rows) == golden("golden_sweep.csv"));
}

TEST_CASE("CSV values round-trip at full precision") {
  Reconstruction rec = two_points();
  rec.values[0] = Complex(1.0 / 3.0, -std::sqrt(2.0));
  const std::string csv = reconstruction_csv(rec);
  const auto line = csv.substr(csv.find('\n') + 1);
  std::stringstream ss(line);
  std::string cell;
  for (int i = 0; i < 4; ++i) std::getline(ss, cell, ',');
  CHECK(std::stod(cell) == 1.0 / 3.0);
}

TEST_CASE("slope fit") {
  std::vector<double> x = {0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(0.5 * v - 1.0);
  SlopeFit f = fit_slope(x, y);
  CHECK(f.ok);
  CHECK(f.slope == doctest::Approx(0.5));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.ci_high - f.ci_low == doctest::Approx(0.0).epsilon(1e-12));

  y = {0.1, 0.4, 1.2, 1.4, 2.1};
  f = fit_slope(x, y);
  CHECK(f.ci_low < f.slope);
  CHECK(f.slope < f.ci_high);
  // t_{0.975, 3} = 3.182446
  CHECK((f.ci_high - f.slope) / f.stderr_slope == doctest::Approx(3.182446).epsilon(1e-6));

  CHECK_FALSE(fit_slope({1, 1, 1, 1}, {1, 2, 3, 4}).ok);
  CHECK_FALSE(fit_slope({1}, {1}).ok);
  CHECK_FALSE(fit_slope({1, 2}, {1, NAN}).ok);
  CHECK(fit_slope({1, 1, 1, 1}, {1, 2, 3, 4}).status == "zero variance in the abscissa");
}

TEST_CASE("svg chart is self-contained") {
  const Series s{"err", {1e-6, 1e-4, 0.0, 1e-2}, {0.1, 0.2, 0.3, 0.5}};
  const std::string svg = svg_line_chart("t<1>", "eps", "sup", {s}, true, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("t&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  // The x = 0 point is dropped on a log axis: three markers.
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  CHECK(circles == 3u);
  CHECK(svg.find("nan") == std::string::npos);
}
