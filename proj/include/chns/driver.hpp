#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "chns/config.hpp"
#include "chns/diagnostics.hpp"
#include "chns/manufactured.hpp"
#include "chns/stepper.hpp"

namespace chns {

/// Mesh from `mesh.file` if set, else the structured unit square.
std::shared_ptr<const Mesh> make_mesh(const RunConfig& cfg);

SchemeParams scheme_params(const RunConfig& cfg);

/// Probes are dense eigensolves; meshes above this element count are skipped.
inline constexpr std::size_t kProbeElementLimit = 512;

struct SimulationResult {
  TimeStepState initial;
  TimeStepState final_state;
  std::vector<StepDiagnostics> history;  // index = step
  double mass_drift = 0.0;            // max_n |mass(n) - mass(0)|
  double max_energy_increase = 0.0;   // max_n F(n) - F(n-1), negative if strictly dissipative
  std::optional<ConstantProbes> probes;
};

/// Builds the initial state from the preset and steps to scheme.T. With the
/// mms preset the builtin manufactured forcing is switched on.
/// `observer` sees every state including the initial one.
SimulationResult simulate(const RunConfig& cfg,
                          const std::function<void(const TimeStepState&)>& observer = nullptr);

/// Spatial or temporal study on the builtin manufactured case; runs are
/// distributed over `run.threads` threads.
ConvergenceOptions mms_options(const RunConfig& cfg);
ConvergenceTable verify_mms(const RunConfig& cfg);

/// Probes on the configured mesh, or nullopt above kProbeElementLimit.
std::optional<ConstantProbes> probe(const RunConfig& cfg, const Mesh& mesh);

/// step,time,mass,F_total,F_kinetic,F_chemical,F_interfacial,mu_dg,v_dg,newton_iters
void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, const TimeStepState& s);

/// Per-element nodal samples (vertices, plus edge midpoints for q >= 2).
void write_field_csv(std::ostream& out, const TimeStepState& s);
/// Legacy VTK unstructured grid with duplicated nodes per element.
void write_field_vtk(std::ostream& out, const TimeStepState& s);

/// Runs the configured mode and writes all files into cfg.out_dir.
/// Throws ConfigError, NewtonDivergence, SingularSystemError.
void run(const RunConfig& cfg, std::ostream& log);

}  // namespace chns
