#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rsi/fields/fields.hpp"
#include "rsi/inversion/inversion.hpp"

namespace rsi::harness {

enum class SelectionRule { kFixed, kHolder, kLog };
enum class SweepMode { kHolder, kLog, kMonteCarlo };

/// Flat key = value run description. Lengths are in units of the source-ball
/// radius (the source lives in the unit ball), wavenumbers in inverse units.
struct RunConfig {
  double k = 5.0;
  double R = 1.5;
  int mesh_level = 2;
  int sphere_order = 20;
  std::uint64_t n_realizations = 1000;
  std::uint64_t seed = 1;

  StrengthField strength;
  MediumField medium;
  bool has_medium = false;

  ProbeKind probe = ProbeKind::kReal;
  SelectionRule rule = SelectionRule::kFixed;
  double rho = 9.0;       // fixed rule
  double t = 1.0;         // fixed rule, complex probes
  double cal = 1.0;       // Hölder rule
  double cal7 = 0.003;    // logarithmic rule
  double tau = 0.5;       // logarithmic rule
  double freq_spacing = 0.75;
  double eval_spacing = 0.1;

  SweepMode sweep_mode = SweepMode::kHolder;
  std::vector<double> sweep_values;
  std::uint64_t perturb_seed = 7;

  /// Key/value pairs in file order, as parsed (for the manifest echo).
  std::vector<std::pair<std::string, std::string>> echo;

  /// Throws ConfigError / DomainError when a value violates module invariants.
  void validate() const;
};

/// Parses config text. Blank lines and '#' comments are ignored; unknown keys,
/// malformed values and duplicate scalar keys throw ConfigError with the line
/// number. `strength_bump` and `medium_bump` may repeat.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form (parse_config(to_text(c)) reproduces c).
std::string to_text(const RunConfig& c);

const char* rule_name(SelectionRule r);
const char* sweep_mode_name(SweepMode m);

}  // namespace rsi::harness
