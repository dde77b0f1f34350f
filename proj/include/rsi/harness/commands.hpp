#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsi/harness/config.hpp"
#include "rsi/harness/report.hpp"

namespace rsi::harness {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct CommandOptions {
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::string corr_path;              // reconstruct input
  std::ostream* log = nullptr;        // progress lines, optional
};

/// Every command writes its artifacts plus manifest.json into out_dir and
/// returns the manifest. The manifest carries the canonical config text, the
/// seeds and thread count, so rerunning with threads = 1 reproduces the
/// artifacts byte for byte.
nlohmann::json cmd_simulate(const RunConfig& cfg, const CommandOptions& opt);
nlohmann::json cmd_oracle(const RunConfig& cfg, const CommandOptions& opt);
/// Throws DomainError when the dataset's k, R or node count disagree with the
/// config.
nlohmann::json cmd_reconstruct(const RunConfig& cfg, const CommandOptions& opt);
/// Throws ConfigError with fewer than four sweep values.
nlohmann::json cmd_sweep_stability(const RunConfig& cfg,
                                   const CommandOptions& opt);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  bool at_least = false;  // pass when value >= limit instead of <=
  std::string detail;
};

/// Runs the invariant suite at a reduced scale (mesh level <= 2, sphere order
/// <= 12) and writes selfcheck.txt. manifest["pass"] is false when any check
/// fails.
nlohmann::json cmd_selfcheck(const RunConfig& cfg, const CommandOptions& opt,
                             std::vector<CheckResult>* results = nullptr);

std::string format_check_row(const CheckResult& r);
std::string format_check_table(const std::vector<CheckResult>& results);

// Pieces shared with the tests.

struct SweepOutcome {
  std::vector<SweepRow> rows;
  SlopeFit fit;
  std::vector<double> abscissa;  // x used in the fit
  bool monotone = false;         // sup-error nonincreasing as eps decreases
  double target_slope = 0.0;
};

/// Sweep on given base correlations (holder/log: perturbation magnitudes;
/// mc: realization counts, requiring `op`/`mesh`).
SweepOutcome run_sweep(const RunConfig& cfg, const CorrelationSet& base,
                       const BoundaryOperator* op, const TetMesh* mesh,
                       int threads, std::ostream* log = nullptr);

/// (rho, t) chosen by the configured rule for a data statistic M.
struct Selection {
  double rho = 0.0;
  double t = 0.0;
  std::string warning;
};
Selection select_parameters(const RunConfig& cfg, SelectionRule rule, double M);

/// Frequency grid on |gamma| <= rho with spacing min(freq_spacing, rho / 2).
std::shared_ptr<const FrequencyGrid> make_grid(const RunConfig& cfg, double rho);

/// Relative gap between the boundary functional of deterministic Cauchy data
/// for density g and the volume integral of g e^{i k x_3} (Fourier oracle).
double green_identity_error(const TetMesh& mesh, const Bump<double>& g,
                            std::shared_ptr<const SphereQuadrature> sphere,
                            double k);

}  // namespace rsi::harness
