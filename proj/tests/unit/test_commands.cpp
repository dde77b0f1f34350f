#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rsi/harness/commands.hpp"
#include "rsi/harness/corr_io.hpp"

using namespace rsi;
using namespace rsi::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rsi_cmd_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config() {
  return parse_config(R"(
k = 4
R = 1.5
mesh_level = 1
sphere_order = 5
n_realizations = 40
seed = 3
strength_bump = 0.1 -0.05 0.1 0.55 1
freq_spacing = 1
eval_spacing = 0.25
rho = 6
)");
}

}  // namespace

TEST_CASE("simulate is deterministic and writes a manifest") {
  const RunConfig c = small_config();
  CommandOptions o;
  o.out_dir = scratch("sim_a").string();
  const auto m = cmd_simulate(c, o);
  o.out_dir = scratch("sim_b").string();
  cmd_simulate(c, o);
  CHECK(slurp(scratch("x").parent_path() / "rsi_cmd_sim_a/corr.bin") ==
        slurp(fs::path(o.out_dir) / "corr.bin"));
  CHECK(m["seed"] == 3);
  CHECK(m["provenance"] == "monte_carlo");
  CHECK(m["artifact_version"] == kArtifactVersion);
  CHECK(fs::exists(fs::path(o.out_dir) / "manifest.json"));

  // The manifest's config text reproduces the run.
  const RunConfig replay = parse_config(m["config_text"].get<std::string>());
  o.out_dir = scratch("sim_c").string();
  cmd_simulate(replay, o);
  CHECK(slurp(fs::path(o.out_dir) / "corr.bin") == slurp(fs::temp_directory_path() / "rsi_cmd_sim_b/corr.bin"));

  o.seed = 4;
  o.out_dir = scratch("sim_d").string();
  CHECK(cmd_simulate(c, o)["seed"] == 4);
  CHECK(slurp(fs::path(o.out_dir) / "corr.bin") != slurp(fs::temp_directory_path() / "rsi_cmd_sim_b/corr.bin"));
}

TEST_CASE("zero strength, one realization: zero correlations") {
  RunConfig c = small_config();
  c.strength.bumps.clear();
  c.n_realizations = 1;
  CommandOptions o;
  o.out_dir = scratch("zero").string();
  const auto m = cmd_simulate(c, o);
  CHECK(m["M"] == 0.0);
  const Dataset d = read_corr1(o.out_dir + "/corr.bin");
  for (const auto& z : d.correlations.f1) CHECK(z == Complex(0, 0));

  o.corr_path = o.out_dir + "/corr.bin";
  o.out_dir = scratch("zero_rec").string();
  const auto r = cmd_reconstruct(c, o);
  CHECK(r["errors"]["sup_error"] == 0.0);
}

TEST_CASE("oracle provenance and the q = 0 reduction") {
  RunConfig c = small_config();
  CommandOptions o;
  o.out_dir = scratch("or_h").string();
  CHECK(cmd_oracle(c, o)["provenance"] == "exact_homog");
  const Dataset h = read_corr1(o.out_dir + "/corr.bin");

  c.medium.bumps.push_back({Vec3::Zero(), 0.3, Complex(0.0, 0.0)});
  c.has_medium = true;
  o.out_dir = scratch("or_q0").string();
  CHECK(cmd_oracle(c, o)["provenance"] == "exact_inhomog");
  const Dataset q = read_corr1(o.out_dir + "/corr.bin");
  for (std::size_t i = 0; i < h.correlations.f1.size(); ++i) {
    CHECK(std::abs(q.correlations.f1[i] - h.correlations.f1[i]) <= 1e-12 * std::abs(h.correlations.f1[i]) + 1e-300);
    CHECK(std::abs(q.correlations.f3[i] - h.correlations.f3[i]) <= 1e-12 * std::abs(h.correlations.f3[i]) + 1e-300);
  }
}

TEST_CASE("reconstruct: outputs, repeatability and geometry checks") {
  const RunConfig c = small_config();
  CommandOptions o;
  o.out_dir = scratch("rec_in").string();
  cmd_oracle(c, o);
  o.corr_path = o.out_dir + "/corr.bin";
  o.out_dir = scratch("rec_a").string();
  const auto m = cmd_reconstruct(c, o);
  CHECK(m["rho"] == 6.0);
  CHECK(m["errors"]["sup_error"].get<double>() > 0.0);
  for (const char* f : {"spectral.csv", "reconstruction.csv", "reconstruction.svg", "manifest.json"})
    CHECK(fs::exists(fs::path(o.out_dir) / f));
  const std::string first = slurp(fs::path(o.out_dir) / "reconstruction.csv");
  CHECK(first.rfind("x,y,z,re_mu,im_mu,truth\n", 0) == 0);
  o.out_dir = scratch("rec_b").string();
  cmd_reconstruct(c, o);
  CHECK(slurp(fs::path(o.out_dir) / "reconstruction.csv") == first);

  RunConfig wrong = c;
  wrong.k = 5.0;
  CHECK_THROWS_WITH_AS(cmd_reconstruct(wrong, o), doctest::Contains("k"), DomainError);
  wrong = c;
  wrong.R = 1.6;
  CHECK_THROWS_AS(cmd_reconstruct(wrong, o), DomainError);
  wrong = c;
  wrong.sphere_order = 6;
  CHECK_THROWS_WITH_AS(cmd_reconstruct(wrong, o), doctest::Contains("sphere"), DomainError);

  // A corrupted dataset surfaces as a load error.
  std::string bytes = slurp(o.corr_path);
  bytes[1] = '?';
  const fs::path broken = scratch("broken.bin");
  std::ofstream(broken, std::ios::binary) << bytes;
  o.corr_path = broken.string();
  CHECK_THROWS_WITH_AS(cmd_reconstruct(c, o), doctest::Contains("magic"), IoError);
}

TEST_CASE("sweep-stability: preconditions, outputs and degenerate fits") {
  RunConfig c = small_config();
  c.sweep_values = {1e-3};
  CommandOptions o;
  o.out_dir = scratch("sw1").string();
  CHECK_THROWS_AS(cmd_sweep_stability(c, o), ConfigError);

  c.sweep_values = {1e-4, 1e-3, 1e-2, 1e-1};
  c.cal = 1.0;
  const auto m = cmd_sweep_stability(c, o);
  CHECK(m["rows"].size() == 4u);
  CHECK(m["fit"]["ok"] == true);
  CHECK(slurp(fs::path(o.out_dir) / "sweep.csv").rfind("eps_or_N,M,rho,t,sup_error,l2_error\n", 0) == 0);
  CHECK(fs::exists(fs::path(o.out_dir) / "sweep.svg"));

  // Identical abscissae: reported as a degenerate fit, not a crash.
  c.sweep_values = {1e-3, 1e-3, 1e-3, 1e-3};
  const auto d = cmd_sweep_stability(c, o);
  CHECK(d["fit"]["ok"] == false);
  CHECK(d["fit"]["status"] == "zero variance in the abscissa");

  c.sweep_mode = SweepMode::kMonteCarlo;
  c.sweep_values = {10, 20, 40, 80};
  const auto mc = cmd_sweep_stability(c, o);
  CHECK(mc["rows"][0]["M"].get<double>() > mc["rows"][3]["M"].get<double>());
}

TEST_CASE("selfcheck passes on the default configuration") {
  CommandOptions o;
  o.out_dir = scratch("self").string();
  std::vector<CheckResult> results;
  const auto m = cmd_selfcheck(RunConfig{}, o, &results);
  for (const auto& r : results) CHECK_MESSAGE(r.pass, r.name << ": " << r.detail);
  CHECK(m["pass"] == true);
  CHECK(results.size() >= 10u);
  CHECK(slurp(fs::path(o.out_dir) / "selfcheck.txt").find("FAIL") == std::string::npos);
}
