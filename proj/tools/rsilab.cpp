// rsilab: command-line driver for the random-source laboratory.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsi/harness/commands.hpp"

namespace {

int run(const std::string& name, const std::string& config_path,
        rsi::harness::CommandOptions opt) {
  using namespace rsi::harness;
  const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  opt.log = &std::cerr;
  if (name == "simulate") {
    cmd_simulate(cfg, opt);
  } else if (name == "oracle") {
    cmd_oracle(cfg, opt);
  } else if (name == "reconstruct") {
    cmd_reconstruct(cfg, opt);
  } else if (name == "sweep-stability") {
    const auto m = cmd_sweep_stability(cfg, opt);
    std::cout << m["fit"].dump() << "\n";
  } else if (name == "selfcheck") {
    std::vector<CheckResult> results;
    opt.log = nullptr;
    const auto m = cmd_selfcheck(cfg, opt, &results);
    std::cout << format_check_table(results);
    if (!m["pass"].get<bool>()) {
      std::cout << "selfcheck FAILED\n";
      return 1;
    }
    std::cout << "selfcheck passed\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Helmholtz inverse random source laboratory"};
  app.require_subcommand(1);

  std::string config_path, corr_path;
  rsi::harness::CommandOptions opt;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "run configuration file");
    if (needs_config) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads (1 = bitwise deterministic)")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
  };
  add_common(app.add_subcommand("simulate", "Monte Carlo correlations -> corr.bin"), true);
  add_common(app.add_subcommand("oracle", "exact correlations -> corr.bin"), true);
  auto* rec = app.add_subcommand("reconstruct", "correlations -> strength estimate");
  add_common(rec, true);
  rec->add_option("--corr", corr_path, "CORR1 dataset")->required()->check(CLI::ExistingFile);
  add_common(app.add_subcommand("sweep-stability", "stability exponent sweep"), true);
  add_common(app.add_subcommand("selfcheck", "invariant suite"), false);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--seed") > 0) opt.seed = seed;
  opt.corr_path = corr_path;
  try {
    return run(name, config_path, opt);
  } catch (const rsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rsi::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const rsi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
