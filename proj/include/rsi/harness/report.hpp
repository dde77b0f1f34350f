#pragma once

#include <string>
#include <vector>

#include "rsi/inversion/inversion.hpp"

namespace rsi::harness {

// CSV schemas. Column sets are part of the interface and covered by
// golden-file tests.
inline constexpr const char* kSpectralHeader =
    "gamma_x,gamma_y,gamma_z,re_muhat,im_muhat";
inline constexpr const char* kReconstructionHeader = "x,y,z,re_mu,im_mu,truth";
inline constexpr const char* kSweepHeader =
    "eps_or_N,M,rho,t,sup_error,l2_error";

struct SweepRow {
  double eps_or_n = 0.0;
  double M = 0.0;
  double rho = 0.0;
  double t = 0.0;
  double sup_error = 0.0;
  double l2_error = 0.0;
};

std::string spectral_csv(const SpectralEstimate& se);
/// `truth` column is empty when the reconstruction carries no ground truth.
std::string reconstruction_csv(const Reconstruction& rec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

void write_text(const std::string& path, const std::string& text);

/// Ordinary least squares y = a + b x with a two-sided 95% interval on b.
struct SlopeFit {
  bool ok = false;
  std::string status;  // why the fit is degenerate, when !ok
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Static SVG line chart. Log axes drop nonpositive points.
std::string svg_line_chart(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<Series>& series, bool log_x,
                           bool log_y);

}  // namespace rsi::harness
