#include "rsi/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rsi::harness {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& v, int line) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("line " + std::to_string(line) + ": '" + v +
                      "' is not a finite number");
  }
  return x;
}

std::uint64_t to_u64(const std::string& v, int line) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw ConfigError("line " + std::to_string(line) + ": '" + v +
                      "' is not a nonnegative integer");
  }
  return x;
}

int to_int(const std::string& v, int line) {
  const auto x = to_u64(v, line);
  if (x > 1000000) throw ConfigError("line " + std::to_string(line) + ": value too large");
  return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& v, int line, std::size_t want) {
  std::vector<double> out;
  for (const auto& tok : split_ws(v)) out.push_back(to_double(tok, line));
  if (want != 0 && out.size() != want) {
    throw ConfigError("line " + std::to_string(line) + ": expected " +
                      std::to_string(want) + " numbers, got " +
                      std::to_string(out.size()));
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

const char* rule_name(SelectionRule r) {
  switch (r) {
    case SelectionRule::kFixed: return "fixed";
    case SelectionRule::kHolder: return "holder";
    case SelectionRule::kLog: return "log";
  }
  return "?";
}

const char* sweep_mode_name(SweepMode m) {
  switch (m) {
    case SweepMode::kHolder: return "holder";
    case SweepMode::kLog: return "log";
    case SweepMode::kMonteCarlo: return "mc";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter> scalar = {
      {"k", [&](auto& v, int l) { c.k = to_double(v, l); }},
      {"R", [&](auto& v, int l) { c.R = to_double(v, l); }},
      {"mesh_level", [&](auto& v, int l) { c.mesh_level = to_int(v, l); }},
      {"sphere_order", [&](auto& v, int l) { c.sphere_order = to_int(v, l); }},
      {"n_realizations", [&](auto& v, int l) { c.n_realizations = to_u64(v, l); }},
      {"seed", [&](auto& v, int l) { c.seed = to_u64(v, l); }},
      {"smoothness", [&](auto& v, int l) { c.strength.smoothness = to_double(v, l); }},
      {"probe",
       [&](auto& v, int l) {
         if (v == "real") c.probe = ProbeKind::kReal;
         else if (v == "complex") c.probe = ProbeKind::kComplex;
         else throw ConfigError("line " + std::to_string(l) + ": probe must be real|complex");
       }},
      {"rule",
       [&](auto& v, int l) {
         if (v == "fixed") c.rule = SelectionRule::kFixed;
         else if (v == "holder") c.rule = SelectionRule::kHolder;
         else if (v == "log") c.rule = SelectionRule::kLog;
         else throw ConfigError("line " + std::to_string(l) + ": rule must be fixed|holder|log");
       }},
      {"rho", [&](auto& v, int l) { c.rho = to_double(v, l); }},
      {"t", [&](auto& v, int l) { c.t = to_double(v, l); }},
      {"cal", [&](auto& v, int l) { c.cal = to_double(v, l); }},
      {"cal7", [&](auto& v, int l) { c.cal7 = to_double(v, l); }},
      {"tau", [&](auto& v, int l) { c.tau = to_double(v, l); }},
      {"freq_spacing", [&](auto& v, int l) { c.freq_spacing = to_double(v, l); }},
      {"eval_spacing", [&](auto& v, int l) { c.eval_spacing = to_double(v, l); }},
      {"sweep_mode",
       [&](auto& v, int l) {
         if (v == "holder") c.sweep_mode = SweepMode::kHolder;
         else if (v == "log") c.sweep_mode = SweepMode::kLog;
         else if (v == "mc") c.sweep_mode = SweepMode::kMonteCarlo;
         else throw ConfigError("line " + std::to_string(l) + ": sweep_mode must be holder|log|mc");
       }},
      {"sweep_values", [&](auto& v, int l) { c.sweep_values = to_list(v, l, 0); }},
      {"perturb_seed", [&](auto& v, int l) { c.perturb_seed = to_u64(v, l); }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  int line = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": empty value for '" + key + "'");
    }
    c.echo.emplace_back(key, value);
    if (key == "strength_bump") {
      const auto v = to_list(value, line, 5);
      c.strength.bumps.push_back({Vec3(v[0], v[1], v[2]), v[3], v[4]});
      continue;
    }
    if (key == "medium_bump") {
      const auto v = to_list(value, line, 6);
      c.medium.bumps.push_back({Vec3(v[0], v[1], v[2]), v[3], Complex(v[4], v[5])});
      c.has_medium = true;
      continue;
    }
    const auto it = scalar.find(key);
    if (it == scalar.end()) {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    it->second(value, line);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("k must be > 0");
  if (!(R > 1.0)) throw DomainError("R must be > 1 (the measurement sphere encloses B1)");
  if (mesh_level < 0 || mesh_level > kMaxRefinementLevel) {
    throw ConfigError("mesh_level must lie in [0, " +
                      std::to_string(kMaxRefinementLevel) + "]");
  }
  if (sphere_order < 4) throw ConfigError("sphere_order must be >= 4");
  if (n_realizations == 0) throw ConfigError("n_realizations must be >= 1");
  strength.validate();
  if (has_medium) medium.validate();
  if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
  if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
  if (!(cal > 0.0) || !(cal7 > 0.0)) throw ConfigError("cal and cal7 must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(freq_spacing > 0.0)) throw ConfigError("freq_spacing must be > 0");
  if (!(eval_spacing > 0.0 && eval_spacing <= 0.5)) {
    throw ConfigError("eval_spacing must lie in (0, 0.5]");
  }
  for (double v : sweep_values)
    if (!(v > 0.0)) throw ConfigError("sweep_values must be positive");
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "k = " << fmt(c.k) << "\n"
    << "R = " << fmt(c.R) << "\n"
    << "mesh_level = " << c.mesh_level << "\n"
    << "sphere_order = " << c.sphere_order << "\n"
    << "n_realizations = " << c.n_realizations << "\n"
    << "seed = " << c.seed << "\n"
    << "smoothness = " << fmt(c.strength.smoothness) << "\n";
  for (const auto& b : c.strength.bumps) {
    o << "strength_bump = " << fmt(b.center.x()) << " " << fmt(b.center.y()) << " "
      << fmt(b.center.z()) << " " << fmt(b.radius) << " " << fmt(b.amplitude) << "\n";
  }
  for (const auto& b : c.medium.bumps) {
    o << "medium_bump = " << fmt(b.center.x()) << " " << fmt(b.center.y()) << " "
      << fmt(b.center.z()) << " " << fmt(b.radius) << " " << fmt(b.amplitude.real())
      << " " << fmt(b.amplitude.imag()) << "\n";
  }
  o << "probe = " << probe_kind_name(c.probe) << "\n"
    << "rule = " << rule_name(c.rule) << "\n"
    << "rho = " << fmt(c.rho) << "\n"
    << "t = " << fmt(c.t) << "\n"
    << "cal = " << fmt(c.cal) << "\n"
    << "cal7 = " << fmt(c.cal7) << "\n"
    << "tau = " << fmt(c.tau) << "\n"
    << "freq_spacing = " << fmt(c.freq_spacing) << "\n"
    << "eval_spacing = " << fmt(c.eval_spacing) << "\n"
    << "sweep_mode = " << sweep_mode_name(c.sweep_mode) << "\n";
  if (!c.sweep_values.empty()) {
    o << "sweep_values =";
    for (double v : c.sweep_values) o << " " << fmt(v);
    o << "\n";
  }
  o << "perturb_seed = " << c.perturb_seed << "\n";
  return o.str();
}

}  // namespace rsi::harness
