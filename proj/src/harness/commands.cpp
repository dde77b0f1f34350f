#include "rsi/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "rsi/forward/exterior.hpp"
#include "rsi/harness/corr_io.hpp"
#include "rsi/simd/kernels.hpp"

namespace rsi::harness {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path prepare_out(const CommandOptions& opt) {
  std::filesystem::path dir(opt.out_dir.empty() ? "." : opt.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

void say(const CommandOptions& opt, const std::string& line) {
  if (opt.log != nullptr) *opt.log << line << std::endl;
}

std::uint64_t effective_seed(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.seed.value_or(cfg.seed);
}

json base_manifest(const std::string& command, const RunConfig& cfg,
                   const CommandOptions& opt) {
  json m;
  m["tool"] = "rsilab";
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["config_text"] = to_text(cfg);
  json echo = json::array();
  for (const auto& [k, v] : cfg.echo) echo.push_back({{"key", k}, {"value", v}});
  m["config_echo"] = echo;
  m["seed"] = effective_seed(cfg, opt);
  m["perturb_seed"] = cfg.perturb_seed;
  m["threads"] = opt.threads;
  m["simd_backend"] = std::string(simd::backend_name(simd::active_backend()));
  m["timings_s"] = json::object();
  return m;
}

void write_manifest(const std::filesystem::path& dir, const json& m) {
  write_text((dir / "manifest.json").string(), m.dump(2) + "\n");
}

std::shared_ptr<const SphereQuadrature> measurement_sphere(const RunConfig& cfg) {
  return std::make_shared<const SphereQuadrature>(
      build_sphere_quadrature(cfg.R, cfg.sphere_order));
}

const MediumField* medium_of(const RunConfig& cfg) {
  return cfg.has_medium ? &cfg.medium : nullptr;
}

CorrelationSet oracle_for(const RunConfig& cfg, const TetMesh& mesh,
                          std::shared_ptr<const SphereQuadrature> sphere) {
  if (cfg.has_medium) {
    return exact_correlations_inhomogeneous(mesh, cfg.strength, cfg.medium,
                                            std::move(sphere), cfg.k);
  }
  return exact_correlations_homogeneous(mesh, cfg.strength, std::move(sphere),
                                        cfg.k);
}

Reconstruction reconstruct_with(const RunConfig& cfg, const CorrelationSet& cs,
                                const Selection& sel, int threads,
                                const EvaluationGrid& eval) {
  const auto grid = make_grid(cfg, sel.rho);
  const auto se = estimate_spectrum(cs, grid, cfg.probe, sel.t, threads);
  return invert_truncated(se, eval, &cfg.strength);
}

std::string profile_svg(const Reconstruction& rec, double spacing) {
  std::vector<std::pair<double, std::size_t>> line;
  for (std::size_t p = 0; p < rec.points.size(); ++p) {
    const Vec3& x = rec.points[p];
    if (std::abs(x.y()) < 0.5 * spacing && std::abs(x.z()) < 0.5 * spacing)
      line.emplace_back(x.x(), p);
  }
  std::sort(line.begin(), line.end());
  Series est{"reconstruction (real part)", {}, {}};
  Series tru{"truth", {}, {}};
  for (const auto& [x, p] : line) {
    est.x.push_back(x);
    est.y.push_back(rec.values[p].real());
    if (!rec.truth.empty()) {
      tru.x.push_back(x);
      tru.y.push_back(rec.truth[p]);
    }
  }
  std::vector<Series> series{est};
  if (!rec.truth.empty()) series.push_back(tru);
  return svg_line_chart("strength along the x axis", "x", "mu", series, false,
                        false);
}

json errors_json(const Reconstruction& rec) {
  return {{"sup_error", rec.sup_error},
          {"l2_error", rec.l2_error},
          {"sup_error_clamped", rec.sup_error_clamped},
          {"l2_error_clamped", rec.l2_error_clamped},
          {"truth_sup", rec.truth_sup},
          {"max_imag", rec.max_imag}};
}

json fit_json(const SlopeFit& f) {
  return {{"ok", f.ok},          {"status", f.status},
          {"slope", f.slope},    {"intercept", f.intercept},
          {"stderr", f.stderr_slope},
          {"ci95_low", f.ci_low}, {"ci95_high", f.ci_high},
          {"n", f.n}};
}

StrengthField selfcheck_strength(const RunConfig& cfg) {
  if (!cfg.strength.is_zero()) return cfg.strength;
  StrengthField f;
  f.smoothness = cfg.strength.smoothness;
  f.bumps.push_back({Vec3(0.1, -0.05, 0.1), 0.5, 1.0});
  return f;
}

}  // namespace

Selection select_parameters(const RunConfig& cfg, SelectionRule rule, double M) {
  Selection s;
  switch (rule) {
    case SelectionRule::kFixed:
      s.rho = cfg.rho;
      s.t = cfg.t;
      break;
    case SelectionRule::kHolder:
      s.rho = select_rho_holder(M, cfg.strength.smoothness, cfg.k, cfg.cal);
      s.t = cfg.t;
      break;
    case SelectionRule::kLog: {
      const auto l = select_t_rho_log(M, cfg.R, cfg.tau, cfg.cal7);
      s.rho = l.rho;
      s.t = l.t;
      s.warning = l.warning;
      break;
    }
  }
  return s;
}

double green_identity_error(const TetMesh& mesh, const Bump<double>& g,
                            std::shared_ptr<const SphereQuadrature> sphere,
                            double k) {
  const Density density = [&](const Vec3& x) { return g(x); };
  const CauchyData data = deterministic_forward(mesh, density, sphere, k);
  const Vec3 d(0.0, 0.0, 1.0);
  std::vector<Complex> U(sphere->size()), dU(sphere->size());
  for (std::size_t i = 0; i < sphere->size(); ++i) {
    U[i] = std::exp(kI * k * d.dot(sphere->nodes[i]));
    dU[i] = kI * k * d.dot(sphere->normals[i]) * U[i];
  }
  const Complex boundary = boundary_functional(data, U, dU);
  // int g e^{i k d.x} dx = (2 pi)^3 mu_hat(-k d)
  StrengthField single;
  single.bumps.push_back(g);
  const Complex volume =
      std::pow(2.0 * kPi, 3) * fourier_oracle(single, Vec3(-k * d));
  return std::abs(boundary - volume) / std::abs(volume);
}

std::shared_ptr<const FrequencyGrid> make_grid(const RunConfig& cfg, double rho) {
  return std::make_shared<const FrequencyGrid>(
      build_frequency_grid(rho, std::min(cfg.freq_spacing, rho / 2.0)));
}

// ---------------------------------------------------------------------------

json cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
  cfg.validate();
  const auto dir = prepare_out(opt);
  json m = base_manifest("simulate", cfg, opt);
  const auto seed = effective_seed(cfg, opt);

  auto t0 = Clock::now();
  const TetMesh mesh = build_ball_mesh(cfg.mesh_level);
  const auto sphere = measurement_sphere(cfg);
  const BoundaryOperator op =
      noise_operator(mesh, cfg.strength, sphere, cfg.k, medium_of(cfg));
  m["timings_s"]["setup"] = seconds_since(t0);
  say(opt, "simulate: " + std::to_string(cfg.n_realizations) +
               " realizations, " + std::to_string(op.support().size()) +
               " source tets, " + std::to_string(sphere->size()) + " nodes");

  t0 = Clock::now();
  const auto acc =
      monte_carlo_correlations(op, mesh, cfg.n_realizations, seed, opt.threads);
  CorrelationSet cs = acc.finalize();
  m["timings_s"]["realizations"] = seconds_since(t0);

  t0 = Clock::now();
  write_corr1((dir / "corr.bin").string(), cs, &mesh);
  m["timings_s"]["write"] = seconds_since(t0);
  m["outputs"] = {"corr.bin"};
  m["M"] = cs.M;
  m["n_realizations"] = cs.n_realizations;
  m["provenance"] = provenance_name(cs.provenance);
  m["streams"] = {{"first", 0}, {"count", cfg.n_realizations}};
  write_manifest(dir, m);
  return m;
}

json cmd_oracle(const RunConfig& cfg, const CommandOptions& opt) {
  cfg.validate();
  const auto dir = prepare_out(opt);
  json m = base_manifest("oracle", cfg, opt);

  auto t0 = Clock::now();
  const TetMesh mesh = build_ball_mesh(cfg.mesh_level);
  const auto sphere = measurement_sphere(cfg);
  const CorrelationSet cs = oracle_for(cfg, mesh, sphere);
  m["timings_s"]["assemble"] = seconds_since(t0);

  write_corr1((dir / "corr.bin").string(), cs, &mesh);
  m["outputs"] = {"corr.bin"};
  m["M"] = cs.M;
  m["provenance"] = provenance_name(cs.provenance);
  say(opt, std::string("oracle: ") + provenance_name(cs.provenance) +
               ", M = " + std::to_string(cs.M));
  write_manifest(dir, m);
  return m;
}

json cmd_reconstruct(const RunConfig& cfg, const CommandOptions& opt) {
  cfg.validate();
  if (opt.corr_path.empty()) throw ConfigError("reconstruct: no dataset given");
  const auto dir = prepare_out(opt);
  json m = base_manifest("reconstruct", cfg, opt);
  m["input"] = opt.corr_path;

  auto t0 = Clock::now();
  const Dataset ds = read_corr1(opt.corr_path);
  const CorrelationSet& cs = ds.correlations;
  const auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
  };
  if (rel(cs.k, cfg.k) > 1e-12) {
    throw DomainError("reconstruct: dataset k = " + std::to_string(cs.k) +
                      " but config k = " + std::to_string(cfg.k));
  }
  if (rel(cs.sphere->radius, cfg.R) > 1e-12) {
    throw DomainError("reconstruct: dataset R = " +
                      std::to_string(cs.sphere->radius) + " but config R = " +
                      std::to_string(cfg.R));
  }
  const auto want = static_cast<std::size_t>(2 * cfg.sphere_order * cfg.sphere_order);
  if (cs.n() != want) {
    throw DomainError("reconstruct: dataset has " + std::to_string(cs.n()) +
                      " sphere nodes but sphere_order " +
                      std::to_string(cfg.sphere_order) + " implies " +
                      std::to_string(want));
  }
  m["timings_s"]["read"] = seconds_since(t0);

  const Selection sel = select_parameters(cfg, cfg.rule, cs.M);
  if (!sel.warning.empty()) say(opt, "warning: " + sel.warning);

  t0 = Clock::now();
  const auto grid = make_grid(cfg, sel.rho);
  const auto se = estimate_spectrum(cs, grid, cfg.probe, sel.t, opt.threads);
  m["timings_s"]["spectrum"] = seconds_since(t0);
  t0 = Clock::now();
  const auto eval = make_evaluation_grid(cfg.eval_spacing);
  const Reconstruction rec = invert_truncated(se, eval, &cfg.strength);
  m["timings_s"]["invert"] = seconds_since(t0);

  write_text((dir / "spectral.csv").string(), spectral_csv(se));
  write_text((dir / "reconstruction.csv").string(), reconstruction_csv(rec));
  write_text((dir / "reconstruction.svg").string(),
             profile_svg(rec, cfg.eval_spacing));
  m["outputs"] = {"spectral.csv", "reconstruction.csv", "reconstruction.svg"};
  m["M"] = cs.M;
  m["provenance"] = provenance_name(cs.provenance);
  m["rule"] = rule_name(cfg.rule);
  m["probe"] = probe_kind_name(cfg.probe);
  m["rho"] = sel.rho;
  m["t"] = sel.t;
  if (!sel.warning.empty()) m["warning"] = sel.warning;
  m["frequency_nodes"] = grid->size();
  m["errors"] = errors_json(rec);
  say(opt, "reconstruct: rho = " + std::to_string(sel.rho) +
               ", sup error = " + std::to_string(rec.sup_error));
  write_manifest(dir, m);
  return m;
}

SweepOutcome run_sweep(const RunConfig& cfg, const CorrelationSet& base,
                       const BoundaryOperator* op, const TetMesh* mesh,
                       int threads, std::ostream* log) {
  if (cfg.sweep_values.size() < 4) {
    throw ConfigError("sweep-stability needs at least 4 sweep values, got " +
                      std::to_string(cfg.sweep_values.size()));
  }
  const bool mc = cfg.sweep_mode == SweepMode::kMonteCarlo;
  if (mc && (op == nullptr || mesh == nullptr)) {
    throw ConfigError("mc sweep needs a forward operator");
  }
  const SelectionRule rule =
      cfg.sweep_mode == SweepMode::kLog ? SelectionRule::kLog : SelectionRule::kHolder;
  const auto eval = make_evaluation_grid(cfg.eval_spacing);

  SweepOutcome out;
  for (double v : cfg.sweep_values) {
    CorrelationSet data;
    double M = v;
    if (mc) {
      const auto n = static_cast<std::uint64_t>(std::llround(v));
      if (n < 1) throw ConfigError("mc sweep values are realization counts >= 1");
      data = monte_carlo_correlations(*op, *mesh, n, cfg.seed, threads).finalize();
      const CorrelationSet diff = axpy(data, Complex(-1.0, 0.0), base);
      M = diff.M;
    } else {
      data = perturb(base, v, cfg.perturb_seed);
    }
    const Selection sel = select_parameters(cfg, rule, M);
    const Reconstruction rec = reconstruct_with(cfg, data, sel, threads, eval);
    out.rows.push_back({v, M, sel.rho, sel.t, rec.sup_error, rec.l2_error});
    if (log != nullptr) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "  %-8s %.3e  M %.3e  rho %.3f  t %.3f  sup %.4e",
                    mc ? "N" : "eps", v, M, sel.rho, sel.t, rec.sup_error);
      *log << buf << std::endl;
    }
  }

  std::vector<double> y;
  for (const auto& r : out.rows) {
    double x = 0.0;
    switch (cfg.sweep_mode) {
      case SweepMode::kHolder: x = std::log(r.eps_or_n); break;
      case SweepMode::kLog: x = std::log(std::log(3.0 + 1.0 / r.eps_or_n)); break;
      case SweepMode::kMonteCarlo: x = std::log(r.M); break;
    }
    out.abscissa.push_back(x);
    y.push_back(std::log(r.sup_error));
  }
  out.fit = fit_slope(out.abscissa, y);
  out.target_slope = cfg.sweep_mode == SweepMode::kLog
                         ? 3.0 - cfg.strength.smoothness
                         : 1.0 - 3.0 / cfg.strength.smoothness;

  // Order by data error (eps, or M for MC) and require the error to be
  // nonincreasing as the data improve.
  std::vector<std::size_t> idx(out.rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return out.rows[a].M > out.rows[b].M;
  });
  out.monotone = true;
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (out.rows[idx[i]].sup_error > out.rows[idx[i - 1]].sup_error)
      out.monotone = false;
  return out;
}

json cmd_sweep_stability(const RunConfig& cfg, const CommandOptions& opt) {
  cfg.validate();
  if (cfg.sweep_values.size() < 4) {
    throw ConfigError("sweep-stability needs at least 4 sweep values, got " +
                      std::to_string(cfg.sweep_values.size()));
  }
  const auto dir = prepare_out(opt);
  json m = base_manifest("sweep-stability", cfg, opt);
  RunConfig run = cfg;
  run.seed = effective_seed(cfg, opt);

  auto t0 = Clock::now();
  const TetMesh mesh = build_ball_mesh(cfg.mesh_level);
  const auto sphere = measurement_sphere(cfg);
  const BoundaryOperator op =
      noise_operator(mesh, cfg.strength, sphere, cfg.k, medium_of(cfg));
  const CorrelationSet base = exact_correlations(op, mesh);
  m["timings_s"]["oracle"] = seconds_since(t0);
  say(opt, std::string("sweep-stability (") + sweep_mode_name(cfg.sweep_mode) +
               "), base M = " + std::to_string(base.M));

  t0 = Clock::now();
  const SweepOutcome sw = run_sweep(run, base, &op, &mesh, opt.threads, opt.log);
  m["timings_s"]["sweep"] = seconds_since(t0);

  write_text((dir / "sweep.csv").string(), sweep_csv(sw.rows));
  Series s{"sup error", {}, {}};
  for (const auto& r : sw.rows) {
    s.x.push_back(cfg.sweep_mode == SweepMode::kMonteCarlo ? r.M : r.eps_or_n);
    s.y.push_back(r.sup_error);
  }
  write_text((dir / "sweep.svg").string(),
             svg_line_chart(std::string("stability sweep (") +
                                sweep_mode_name(cfg.sweep_mode) + ")",
                            cfg.sweep_mode == SweepMode::kMonteCarlo
                                ? "data error M"
                                : "perturbation eps",
                            "sup error", {s}, true, true));
  m["outputs"] = {"sweep.csv", "sweep.svg"};
  m["base_M"] = base.M;
  m["sweep_mode"] = sweep_mode_name(cfg.sweep_mode);
  m["fit"] = fit_json(sw.fit);
  m["target_slope"] = sw.target_slope;
  m["monotone_nonincreasing"] = sw.monotone;
  json rows = json::array();
  for (const auto& r : sw.rows)
    rows.push_back({{"eps_or_N", r.eps_or_n}, {"M", r.M}, {"rho", r.rho},
                    {"t", r.t}, {"sup_error", r.sup_error},
                    {"l2_error", r.l2_error}});
  m["rows"] = rows;
  if (!sw.fit.ok) say(opt, "fit degenerate: " + sw.fit.status);
  else
    say(opt, "slope " + std::to_string(sw.fit.slope) + " [" +
                 std::to_string(sw.fit.ci_low) + ", " +
                 std::to_string(sw.fit.ci_high) + "], target " +
                 std::to_string(sw.target_slope));
  write_manifest(dir, m);
  return m;
}

// ---------------------------------------------------------------------------

std::string format_check_row(const CheckResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-6s %12.4e %s %11.4e  %s",
                r.name.c_str(), r.pass ? "PASS" : "FAIL", r.value,
                r.at_least ? ">=" : "<=", r.limit, r.detail.c_str());
  return buf;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-28s %-6s %12s %14s  %s\n", "check",
                "result", "value", "limit", "detail");
  std::string o = buf;
  for (const auto& r : results) o += format_check_row(r) + "\n";
  return o;
}

json cmd_selfcheck(const RunConfig& cfg, const CommandOptions& opt,
                   std::vector<CheckResult>* results_out) {
  cfg.validate();
  const auto dir = prepare_out(opt);
  json m = base_manifest("selfcheck", cfg, opt);
  const auto t_all = Clock::now();
  std::vector<CheckResult> res;
  auto record = [&](std::string name, double value, double limit,
                    std::string detail = {}) {
    res.push_back({std::move(name), value <= limit, value, limit, false,
                   std::move(detail)});
    say(opt, format_check_row(res.back()));
  };
  auto record_at_least = [&](std::string name, double value, double limit,
                             std::string detail = {}) {
    res.push_back({std::move(name), value >= limit, value, limit, true,
                   std::move(detail)});
    say(opt, format_check_row(res.back()));
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      res.push_back({name, false, 0.0, 0.0, false, std::string("threw: ") + e.what()});
      say(opt, name + ": threw " + e.what());
    }
  };

  const double k = cfg.k;
  const int level = std::clamp(cfg.mesh_level, 1, 2);
  const int order = std::min(cfg.sphere_order, 12);
  const StrengthField field = selfcheck_strength(cfg);
  const TetMesh mesh = build_ball_mesh(level);
  const auto sphere = std::make_shared<const SphereQuadrature>(
      build_sphere_quadrature(cfg.R, order));
  std::mt19937_64 rng(effective_seed(cfg, opt));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  guarded("probe_algebra", [&] {
    double sum_err = 0.0, dot_err = 0.0;
    for (int i = 0; i < 200; ++i) {
      Vec3 g(unif(rng), unif(rng), unif(rng));
      const bool complex_kind = i % 2 == 1;
      g *= complex_kind ? 4.0 * k : 1.15 * k;
      if (!complex_kind && g.norm() >= 2.0 * k) g *= 0.5;
      const ProbePair p = complex_kind
                              ? make_complex_probe(g, k, 10.0 * (0.5 * unif(rng) + 0.5) + 1e-3)
                              : make_real_probe(g, k);
      sum_err = std::max(sum_err, (p.xi1 + p.xi2 + g.cast<Complex>()).norm() / k);
      dot_err = std::max(dot_err, std::max(std::abs(dotu(p.xi1, p.xi1) - k * k),
                                           std::abs(dotu(p.xi2, p.xi2) - k * k)) /
                                      (k * k));
    }
    record("probe_sum", sum_err, 1e-12, "|xi1+xi2+gamma|/k, 200 probes");
    record("probe_dispersion", dot_err, 1e-10, "|xi.xi-k^2|/k^2");
  });

  guarded("green_identity", [&] {
    // Broad bump: the centroid rule error is then O(h^2) without a long
    // pre-asymptotic range.
    const Bump<double> b{Vec3::Zero(), 0.95, 1.0};
    StrengthField single;
    single.bumps.push_back(b);
    const auto sphere20 = std::make_shared<const SphereQuadrature>(
        build_sphere_quadrature(cfg.R, std::max(order, 20)));
    double err[2] = {0.0, 0.0}, h[2] = {0.0, 0.0};
    for (int l = 0; l < 2; ++l) {
      const TetMesh m_l = build_ball_mesh(level - 1 + l);
      err[l] = green_identity_error(m_l, b, sphere20, k);
      h[l] = m_l.h_max;
    }
    record("green_identity", err[1], 0.05, "level " + std::to_string(level));
    const double observed = std::log(err[0] / err[1]) / std::log(h[0] / h[1]);
    record_at_least("green_identity_order", observed, 1.5,
                    "observed order in h_max, levels " +
                        std::to_string(level - 1) + "-" + std::to_string(level));
  });

  guarded("ito_isometry", [&] {
    const BoundaryOperator op = noise_operator(mesh, field, sphere, k);
    const CorrelationSet exact = exact_correlations(op, mesh);
    const auto acc = monte_carlo_correlations(op, mesh, 2000,
                                              effective_seed(cfg, opt),
                                              opt.threads, true);
    const CorrelationSet mc = acc.finalize();
    const auto se = acc.standard_errors();
    std::size_t inside = 0, total = 0;
    auto count = [&](const std::vector<Complex>& a, const std::vector<Complex>& e,
                     const std::vector<Complex>& s) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        inside += std::abs(a[i].real() - e[i].real()) <= 4.0 * s[i].real();
        inside += std::abs(a[i].imag() - e[i].imag()) <= 4.0 * s[i].imag();
        total += 2;
      }
    };
    count(mc.f1, exact.f1, se.f1);
    count(mc.f2, exact.f2, se.f2);
    count(mc.f3, exact.f3, se.f3);
    const double frac = static_cast<double>(inside) / static_cast<double>(total);
    record("ito_isometry_4se", 1.0 - frac, 0.05,
           "fraction outside 4 SE, N = 2000");
  });

  guarded("reduction_q0", [&] {
    MediumField zero;
    zero.bumps.push_back({Vec3::Zero(), 0.4, Complex(0.0, 0.0)});
    double diff = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto noise = sample_white_noise(mesh, effective_seed(cfg, opt), s);
      const CauchyData a = solve_homogeneous(mesh, field, noise, sphere, k);
      const CauchyData b = solve_inhomogeneous(mesh, field, zero, noise, sphere, k);
      for (std::size_t i = 0; i < a.u.size(); ++i) {
        diff = std::max(diff, std::abs(a.u[i] - b.u[i]) / std::max(1e-300, std::abs(a.u[i])));
        diff = std::max(diff, std::abs(a.dnu[i] - b.dnu[i]) / std::max(1e-300, std::abs(a.dnu[i])));
      }
    }
    record("reduction_q0", diff, 1e-12, "inhomogeneous path with q = 0");
  });

  guarded("lippmann_schwinger", [&] {
    MediumField q = cfg.medium;
    if (!cfg.has_medium || q.is_zero()) {
      q.bumps = {{Vec3(0.05, 0.0, -0.05), 0.35, Complex(0.5, 0.1)}};
    }
    const LippmannSchwingerSystem ls(mesh, q, k);
    std::vector<Complex> rhs(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j)
      rhs[j] = -std::exp(kI * k * mesh.centroids[j].x()) / (4.0 * kPi);
    const auto u = ls.solve_full(rhs);
    record("ls_residual", ls.relative_residual(u, rhs), 1e-10,
           std::to_string(ls.scatterers().size()) + " scatterers");
  });

  guarded("correlation_symmetry", [&] {
    const CorrelationSet cs = exact_correlations_homogeneous(mesh, field, sphere, k);
    const std::size_t n = cs.n();
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        asym = std::max(asym, std::abs(cs.f1[i * n + j] - cs.f1[j * n + i]));
        asym = std::max(asym, std::abs(cs.f3[i * n + j] - cs.f3[j * n + i]));
      }
    record("f1_f3_symmetry", asym, 0.0, "max |F(i,j) - F(j,i)|");

    const auto zero = CorrelationSet::zeros(sphere, k);
    const auto z = spectral_estimate(zero, make_real_probe(Vec3(1.0, 0.5, 0.0), k));
    record("zero_data_zero_estimate", std::abs(z), 0.0);

    RunConfig small = cfg;
    small.strength = field;
    const Selection sel{0.9 * 2.0 * k, 0.0, {}};
    small.probe = ProbeKind::kReal;
    const auto rec = reconstruct_with(small, cs, sel, opt.threads,
                                      make_evaluation_grid(0.2));
    record("mirrored_imag_residue", rec.max_imag / rec.truth_sup, 1e-6,
           "max |Im mu_rec| / sup mu");
  });

  guarded("corr1_io", [&] {
    const CorrelationSet cs = exact_correlations_homogeneous(mesh, field, sphere, k);
    const auto bytes = encode_corr1(cs, &mesh);
    const Dataset back = decode_corr1(bytes);
    double diff = 0.0;
    for (std::size_t i = 0; i < cs.f1.size(); ++i)
      diff = std::max({diff, std::abs(cs.f1[i] - back.correlations.f1[i]),
                       std::abs(cs.f2[i] - back.correlations.f2[i]),
                       std::abs(cs.f3[i] - back.correlations.f3[i])});
    record("corr1_roundtrip", diff, 0.0);
    auto bad = bytes;
    bad[0] = 'X';
    bool surfaced = false;
    try {
      (void)decode_corr1(bad);
    } catch (const IoError&) {
      surfaced = true;
    }
    record("corr1_bad_magic_rejected", surfaced ? 0.0 : 1.0, 0.0);
  });

  guarded("exterior_propagation", [&] {
    const Bump<double> b{Vec3::Zero(), 0.35, 1.0};
    const Density g = [&](const Vec3& x) { return b(x); };
    const SphereQuadrature unit = build_sphere_rule(1.0, 30);
    const auto inner = deterministic_field(mesh, g, k, unit.nodes);
    std::vector<Vec3> outer_pts;
    for (const auto& x : unit.nodes) outer_pts.push_back(cfg.R * x);
    const auto direct = deterministic_field(mesh, g, k, outer_pts);
    const auto prop = propagate_exterior(inner, unit, cfg.R, k, 20);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      num = std::max(num, std::abs(prop[i] - direct[i]));
      den = std::max(den, std::abs(direct[i]));
    }
    record("exterior_propagation", num / den, 1e-6, "L = 20");
  });

  guarded("simd_equivalence", [&] {
    if (!simd::backend_available(simd::Backend::kAvx2)) {
      res.push_back({"simd_equivalence", true, 0.0, 0.0, false, "avx2 unavailable, skipped"});
      return;
    }
    const std::size_t n = 97;
    std::vector<Complex> a(n * n), l(n), r(n);
    for (auto& z : a) z = {unif(rng), unif(rng)};
    for (auto& z : l) z = {unif(rng), unif(rng)};
    for (auto& z : r) z = {unif(rng), unif(rng)};
    const auto before = simd::active_backend();
    simd::set_backend(simd::Backend::kScalar);
    const Complex s = simd::cbilinear(a.data(), n, n, l.data(), r.data());
    simd::set_backend(simd::Backend::kAvx2);
    const Complex v = simd::cbilinear(a.data(), n, n, l.data(), r.data());
    simd::set_backend(before);
    record("simd_equivalence", std::abs(s - v) / std::abs(s), 1e-12,
           "cbilinear scalar vs avx2");
  });

  const bool pass = std::all_of(res.begin(), res.end(),
                                [](const CheckResult& r) { return r.pass; });
  const std::string table = format_check_table(res);
  write_text((dir / "selfcheck.txt").string(), table);
  m["timings_s"]["total"] = seconds_since(t_all);
  m["mesh_level"] = level;
  m["sphere_order"] = order;
  json checks = json::array();
  for (const auto& r : res)
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"value", r.value},
                      {"limit", r.limit},
                      {"comparison", r.at_least ? ">=" : "<="},
                      {"detail", r.detail}});
  m["checks"] = checks;
  m["pass"] = pass;
  m["outputs"] = {"selfcheck.txt"};
  write_manifest(dir, m);
  if (results_out != nullptr) *results_out = std::move(res);
  return m;
}

}  // namespace rsi::harness
