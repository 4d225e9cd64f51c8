#include "chns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "chns/errors.hpp"

namespace chns {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#' || ch == ';') {
      return line.substr(0, i);
    }
  }
  return line;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<int> to_int_list(const std::string& key, std::string v) {
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(to_int(key, item)));
  }
  if (out.empty()) throw ConfigError(key, "expected a comma separated list of integers");
  return out;
}

template <class E>
E to_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& names) {
  const auto it = names.find(v);
  if (it != names.end()) return it->second;
  std::string allowed;
  for (const auto& [name, _] : names) allowed += (allowed.empty() ? "" : "|") + name;
  throw ConfigError(key, "expected one of " + allowed + ", got '" + v + "'");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

Potential RunConfig::potential() const {
  if (potential_kind == Potential::Kind::Logarithmic) return Potential::logarithmic(theta, theta_c, delta);
  if (radius > 0.0) return Potential::ginzburg_landau(radius);
  return Potential::ginzburg_landau();
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  using Setter = std::function<void(const std::string&)>;
  auto real = [&](double& dst) -> Setter { return [&dst, key](const std::string& s) { dst = to_double(key, s); }; };
  auto integer = [&](int& dst) -> Setter {
    return [&dst, key](const std::string& s) { dst = static_cast<int>(to_int(key, s)); };
  };
  const std::map<std::string, Setter> table = {
      {"mesh.n", integer(mesh_n)},
      {"mesh.file", [&](const std::string& s) { mesh_file = s; }},
      {"space.q", integer(degree)},
      {"space.sigma", real(sigma)},
      {"model.kappa", real(kappa)},
      {"model.mu_s", real(mu_s)},
      {"potential.kind",
       [&](const std::string& s) {
         potential_kind = to_enum<Potential::Kind>(
             key, s,
             {{"ginzburg_landau", Potential::Kind::GinzburgLandau}, {"logarithmic", Potential::Kind::Logarithmic}});
       }},
      {"potential.theta", real(theta)},
      {"potential.theta_c", real(theta_c)},
      {"potential.delta_trunc", real(delta)},
      {"potential.trunc_radius", real(radius)},
      {"scheme.tau", real(tau)},
      {"scheme.T", real(t_final)},
      {"newton.atol", real(newton_atol)},
      {"newton.rtol", real(newton_rtol)},
      {"newton.max_iterations", integer(newton_max_iterations)},
      {"initial.preset",
       [&](const std::string& s) {
         preset = to_enum<InitialPreset>(
             key, s,
             {{"constant", InitialPreset::Constant}, {"spinodal", InitialPreset::Spinodal}, {"mms", InitialPreset::Mms}});
       }},
      {"initial.mean", real(mean)},
      {"initial.amplitude", real(amplitude)},
      {"initial.seed",
       [&](const std::string& s) {
         const long long x = to_int(key, s);
         require(x >= 0, key, "must be non-negative");
         seed = static_cast<unsigned long long>(x);
       }},
      {"initial.modes", integer(modes)},
      {"output.dir", [&](const std::string& s) { out_dir = s; }},
      {"output.every", integer(every)},
      {"run.mode",
       [&](const std::string& s) {
         mode = to_enum<RunMode>(key, s,
                                 {{"simulate", RunMode::Simulate},
                                  {"verify-mms", RunMode::VerifyMms},
                                  {"probe-constants", RunMode::ProbeConstants}});
       }},
      {"run.threads", integer(threads)},
      {"mms.study",
       [&](const std::string& s) {
         mms_study = to_enum<MmsStudy>(key, s, {{"spatial", MmsStudy::Spatial}, {"temporal", MmsStudy::Temporal}});
       }},
      {"mms.meshes", [&](const std::string& s) { mms_meshes = to_int_list(key, s); }},
      {"mms.tau_factor", real(mms_tau_factor)},
      {"mms.multiple", integer(mms_multiple)},
      {"mms.n", integer(mms_n)},
      {"mms.steps", [&](const std::string& s) { mms_steps = to_int_list(key, s); }},
      {"mms.T", real(mms_t_final)},
      {"mms.kappa", real(mms_kappa)},
      {"mms.mu_s", real(mms_mu_s)},
      {"mms.sigma", real(mms_sigma)},
  };
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  if (v.empty()) throw ConfigError(key, "empty value");
  it->second(v);
}

void RunConfig::validate() const {
  require(mesh_file.empty() ? mesh_n >= 1 : true, "mesh.n", "must be >= 1");
  require(degree >= 1 && degree <= 4, "space.q", "must be in 1..4");
  require(sigma >= 0.0, "space.sigma", "must be positive (or 0 for the default 10 q^2)");
  require(kappa > 0.0, "model.kappa", "must be positive");
  require(mu_s > 0.0, "model.mu_s", "must be positive");
  require(theta > 0.0, "potential.theta", "must be positive");
  require(theta_c > 0.0, "potential.theta_c", "must be positive");
  require(delta > 0.0 && delta < 1.0, "potential.delta_trunc", "must be in (0, 1)");
  require(radius >= 0.0, "potential.trunc_radius", "must be non-negative");
  require(tau > 0.0, "scheme.tau", "must be positive");
  require(t_final >= 0.0, "scheme.T", "must be non-negative");
  const double ratio = t_final / tau;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio), "scheme.T",
          "must be an integer multiple of scheme.tau");
  require(newton_atol >= 0.0, "newton.atol", "must be non-negative");
  require(newton_rtol >= 0.0, "newton.rtol", "must be non-negative");
  require(newton_atol > 0.0 || newton_rtol > 0.0, "newton.atol", "atol and rtol cannot both be zero");
  require(newton_max_iterations >= 1, "newton.max_iterations", "must be >= 1");
  require(amplitude >= 0.0, "initial.amplitude", "must be non-negative");
  require(modes >= 1, "initial.modes", "must be >= 1");
  require(every >= 0, "output.every", "must be >= 0");
  require(threads >= 0, "run.threads", "must be >= 0");
  for (int n : mms_meshes) require(n >= 1, "mms.meshes", "entries must be >= 1");
  require(mms_tau_factor > 0.0, "mms.tau_factor", "must be positive");
  require(mms_multiple >= 0, "mms.multiple", "must be >= 0");
  require(mms_n >= 1, "mms.n", "must be >= 1");
  for (int k : mms_steps) require(k >= 1, "mms.steps", "entries must be >= 1");
  require(mms_t_final > 0.0, "mms.T", "must be positive");
  require(mms_kappa > 0.0, "mms.kappa", "must be positive");
  require(mms_mu_s > 0.0, "mms.mu_s", "must be positive");
  require(mms_sigma >= 0.0, "mms.sigma", "must be non-negative");
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string name = trim(line.substr(0, eq));
    const std::string key = section.empty() || name.find('.') != std::string::npos ? name : section + "." + name;
    base.set(key, line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must have the form key=value");
  cfg.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace chns
