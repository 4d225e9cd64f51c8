#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chns/potential.hpp"

namespace chns {

enum class RunMode { Simulate, VerifyMms, ProbeConstants };
enum class InitialPreset { Constant, Spinodal, Mms };
enum class MmsStudy { Spatial, Temporal };

/// Everything one CLI invocation needs. Keys in the config file are
/// `section.name`; see README for the full list.
struct RunConfig {
  // [mesh]
  int mesh_n = 16;
  std::string mesh_file;  // overrides mesh_n when set

  // [space]
  int degree = 1;
  double sigma = 0.0;  // 0: 10 q^2

  // [model]
  double kappa = 1e-2;
  double mu_s = 1.0;

  // [potential]
  Potential::Kind potential_kind = Potential::Kind::GinzburgLandau;
  double theta = 1.0;
  double theta_c = 2.0;
  double delta = 0.05;
  double radius = 0.0;  // GL truncation radius, 0: none

  // [scheme]
  double tau = 1e-2;
  double t_final = 0.1;

  // [newton]
  double newton_atol = 1e-10;
  double newton_rtol = 1e-12;
  int newton_max_iterations = 50;

  // [initial]
  InitialPreset preset = InitialPreset::Spinodal;
  double mean = 0.0;
  double amplitude = 0.05;
  unsigned long long seed = 1;
  int modes = 4;

  // [output]
  std::filesystem::path out_dir = "out";
  int every = 0;  // field dump cadence in steps, 0: initial and final only

  // [run]
  RunMode mode = RunMode::Simulate;

  // [mms]
  MmsStudy mms_study = MmsStudy::Spatial;
  std::vector<int> mms_meshes;  // empty: {4, 8, 16} for q = 1, {4, 8} otherwise
  double mms_tau_factor = 0.1;
  int mms_multiple = 0;         // 0: 2 for q = 1, 1 otherwise
  int mms_n = 32;
  std::vector<int> mms_steps = {4, 8, 16};
  double mms_t_final = 0.5;
  double mms_kappa = 0.05;
  double mms_mu_s = 0.01;
  double mms_sigma = 0.0;       // 0: same as space.sigma
  int threads = 0;              // 0: hardware concurrency

  double effective_sigma() const { return sigma > 0.0 ? sigma : 10.0 * degree * degree; }
  Potential potential() const;

  /// Sets one `section.name` entry from text. Throws ConfigError naming the
  /// key for unknown keys and unparsable or out-of-range values.
  void set(const std::string& key, const std::string& value);

  /// Cross-field checks (positivity, T / tau integral). Throws ConfigError.
  void validate() const;
};

/// Parses `[section]` headers and `key = value` lines; `#` and `;` start
/// comments, values may be quoted. Throws ConfigError.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies a `key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace chns
