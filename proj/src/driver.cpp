#include "chns/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "chns/errors.hpp"
#include "chns/initial_data.hpp"
#include "json.hpp"

namespace chns {
namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output.dir", "cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  return out;
}

// Reference nodes of the sampling pattern: vertices, then edge midpoints.
std::vector<Vec2> sample_nodes(int degree) {
  std::vector<Vec2> nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree >= 2) nodes.insert(nodes.end(), {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}});
  return nodes;
}

json probes_json(const std::optional<ConstantProbes>& p) {
  if (!p) return {{"k_alpha", nullptr}, {"k_eps", nullptr}, {"beta_h", nullptr}, {"c_gamma", nullptr}};
  return {{"k_alpha", p->k_alpha}, {"k_eps", p->k_eps}, {"beta_h", p->beta}, {"c_gamma", p->c_gamma}};
}

json eoc_json(const std::vector<std::optional<double>>& rates) {
  json out = json::array();
  for (const auto& r : rates) out.push_back(r ? json(*r) : json(nullptr));
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output.dir", "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json config_json(const RunConfig& cfg) {
  json j = {{"degree", cfg.degree},
            {"sigma", cfg.effective_sigma()},
            {"kappa", cfg.kappa},
            {"mu_s", cfg.mu_s},
            {"potential", cfg.potential().name()},
            {"tau", cfg.tau},
            {"T", cfg.t_final}};
  if (cfg.mesh_file.empty()) {
    j["mesh"] = {{"n", cfg.mesh_n}};
  } else {
    j["mesh"] = {{"file", cfg.mesh_file}};
  }
  return j;
}

}  // namespace

std::shared_ptr<const Mesh> make_mesh(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) return std::make_shared<Mesh>(load_mesh(cfg.mesh_file));
  return std::make_shared<Mesh>(structured_unit_square(cfg.mesh_n));
}

SchemeParams scheme_params(const RunConfig& cfg) {
  SchemeParams p;
  p.tau = cfg.tau;
  p.kappa = cfg.kappa;
  p.mu_s = cfg.mu_s;
  p.potential = cfg.potential();
  p.newton_atol = cfg.newton_atol;
  p.newton_rtol = cfg.newton_rtol;
  p.newton_max_iterations = cfg.newton_max_iterations;
  return p;
}

std::optional<ConstantProbes> probe(const RunConfig& cfg, const Mesh& mesh) {
  if (mesh.num_elements() > kProbeElementLimit) return std::nullopt;
  auto m = std::make_shared<Mesh>(mesh);
  Discretization disc(m, cfg.degree, cfg.effective_sigma());
  return probe_constants(disc.scalar(), disc.velocity(), disc.pressure(), disc.sigma());
}

SimulationResult simulate(const RunConfig& cfg, const std::function<void(const TimeStepState&)>& observer) {
  cfg.validate();
  auto mesh = make_mesh(cfg);
  auto disc = std::make_shared<Discretization>(mesh, cfg.degree, cfg.effective_sigma());

  std::optional<ManufacturedCase> mcase;
  std::optional<Forcing> forcing;
  if (cfg.preset == InitialPreset::Mms) {
    if (cfg.potential_kind != Potential::Kind::GinzburgLandau || cfg.radius > 0.0) {
      throw ConfigError("initial.preset", "the manufactured solution requires the untruncated ginzburg_landau potential");
    }
    mcase = builtin_case(cfg.kappa, cfg.mu_s);
    forcing = mcase->forcing();
  }
  Stepper stepper(disc, scheme_params(cfg), forcing);

  SimulationResult res;
  const VectorFunction zero_v = [](Vec2) { return Vec2{0.0, 0.0}; };
  switch (cfg.preset) {
    case InitialPreset::Constant:
      res.initial = stepper.initialize([&](Vec2) { return cfg.mean; }, [](Vec2) { return Vec2{0.0, 0.0}; }, zero_v);
      break;
    case InitialPreset::Spinodal: {
      const SpinodalSeed seed(cfg.seed, cfg.amplitude, cfg.mean, cfg.modes);
      res.initial = stepper.initialize(seed.function(), seed.gradient_function(), zero_v);
      break;
    }
    case InitialPreset::Mms:
      res.initial = stepper.initialize([&](Vec2 x) { return mcase->c(x, 0.0); },
                                       [&](Vec2 x) { return mcase->grad_c(x, 0.0); },
                                       [&](Vec2 x) { return mcase->v(x, 0.0); });
      break;
  }

  const long steps = std::lround(cfg.t_final / cfg.tau);
  res.history.push_back(res.initial.diag);
  if (observer) observer(res.initial);
  const double mass0 = res.initial.diag.mass;
  TimeStepState state = res.initial;
  for (long k = 0; k < steps; ++k) {
    TimeStepState next = stepper.step(state);
    res.mass_drift = std::max(res.mass_drift, std::abs(next.diag.mass - mass0));
    const double increase = next.diag.energy.total - state.diag.energy.total;
    res.max_energy_increase = k == 0 ? increase : std::max(res.max_energy_increase, increase);
    res.history.push_back(next.diag);
    if (observer) observer(next);
    state = std::move(next);
  }
  res.final_state = std::move(state);
  return res;
}

ConvergenceOptions mms_options(const RunConfig& cfg) {
  ConvergenceOptions o;
  if (cfg.mms_study == MmsStudy::Spatial) {
    std::vector<int> meshes = cfg.mms_meshes;
    if (meshes.empty()) meshes = cfg.degree == 1 ? std::vector<int>{4, 8, 16} : std::vector<int>{4, 8};
    const int multiple = cfg.mms_multiple > 0 ? cfg.mms_multiple : (cfg.degree == 1 ? 2 : 1);
    o = spatial_study(cfg.degree, meshes, cfg.mms_tau_factor, multiple);
  } else {
    o = temporal_study(cfg.degree, cfg.mms_n, cfg.mms_t_final, cfg.mms_steps);
  }
  o.sigma = cfg.mms_sigma > 0.0 ? cfg.mms_sigma : cfg.effective_sigma();
  return o;
}

ConvergenceTable verify_mms(const RunConfig& cfg) {
  cfg.validate();
  const ManufacturedCase mcase = builtin_case(cfg.mms_kappa, cfg.mms_mu_s);
  const ConvergenceOptions opts = mms_options(cfg);
  const std::size_t nruns = opts.runs.size();
  std::size_t nthreads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, nruns);

  std::vector<std::optional<ConvergenceRow>> rows(nruns);
  std::vector<std::exception_ptr> errors(nruns);
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < nruns; i += nthreads) {
      try {
        ConvergenceOptions one = opts;
        one.runs = {opts.runs[i]};
        rows[i] = run_convergence(mcase, one).rows.front();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  ConvergenceTable table;
  for (auto& r : rows) table.rows.push_back(*r);
  return table;
}

void write_diagnostics_header(std::ostream& out) {
  out << "step,time,mass,F_total,F_kinetic,F_chemical,F_interfacial,mu_dg,v_dg,newton_iters\n";
}

void write_diagnostics_row(std::ostream& out, const TimeStepState& s) {
  const StepDiagnostics& d = s.diag;
  out << s.step << ',' << s.time << ',' << d.mass << ',' << d.energy.total << ',' << d.energy.kinetic << ','
      << d.energy.chemical << ',' << d.energy.interfacial << ',' << d.mu_dg << ',' << d.v_dg << ','
      << d.newton_iterations << '\n';
}

void write_field_csv(std::ostream& out, const TimeStepState& s) {
  const Mesh& mesh = s.c.space->mesh();
  const std::vector<Vec2> nodes = sample_nodes(s.c.space->degree());
  out << "element,node,x,y,c,mu,v0,v1,p\n";
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Vec2 x = mesh.to_physical(e, nodes[k]);
      const Vec2 v = s.v.value_ref(e, nodes[k]);
      out << e << ',' << k << ',' << x.x << ',' << x.y << ',' << s.c.value_ref(e, nodes[k]) << ','
          << s.mu.value_ref(e, nodes[k]) << ',' << v.x << ',' << v.y << ',' << s.p.value_ref(e, nodes[k]) << '\n';
    }
  }
}

void write_field_vtk(std::ostream& out, const TimeStepState& s) {
  const Mesh& mesh = s.c.space->mesh();
  const std::vector<Vec2> nodes = sample_nodes(s.c.space->degree());
  const int ne = static_cast<int>(mesh.num_elements());
  const int npe = static_cast<int>(nodes.size());
  const int np = ne * npe;
  out << "# vtk DataFile Version 3.0\n"
      << "step " << s.step << " time " << s.time << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (int e = 0; e < ne; ++e) {
    for (const Vec2& r : nodes) {
      const Vec2 x = mesh.to_physical(e, r);
      out << x.x << ' ' << x.y << " 0\n";
    }
  }
  out << "CELLS " << ne << ' ' << ne * (npe + 1) << '\n';
  for (int e = 0; e < ne; ++e) {
    out << npe;
    for (int k = 0; k < npe; ++k) out << ' ' << e * npe + k;
    out << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << (npe == 3 ? 5 : 22) << '\n';
  out << "POINT_DATA " << np << '\n';
  auto scalar = [&](const char* name, const ScalarField& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) {
      for (const Vec2& r : nodes) out << f.value_ref(e, r) << '\n';
    }
  };
  scalar("c", s.c);
  scalar("mu", s.mu);
  scalar("p", s.p);
  out << "VECTORS v double\n";
  for (int e = 0; e < ne; ++e) {
    for (const Vec2& r : nodes) {
      const Vec2 v = s.v.value_ref(e, r);
      out << v.x << ' ' << v.y << " 0\n";
    }
  }
}

void run(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const auto start = std::chrono::steady_clock::now();
  json report = {{"config", config_json(cfg)}};

  switch (cfg.mode) {
    case RunMode::Simulate: {
      report["mode"] = "simulate";
      std::ofstream diag = open_output(cfg.out_dir / "diagnostics.csv");
      write_diagnostics_header(diag);
      const long steps = std::lround(cfg.t_final / cfg.tau);
      auto dump = [&](const TimeStepState& s) {
        std::ostringstream name;
        name << "fields_" << std::setw(6) << std::setfill('0') << s.step;
        std::ofstream csv = open_output(cfg.out_dir / (name.str() + ".csv"));
        write_field_csv(csv, s);
        std::ofstream vtk = open_output(cfg.out_dir / (name.str() + ".vtk"));
        write_field_vtk(vtk, s);
      };
      const SimulationResult res = simulate(cfg, [&](const TimeStepState& s) {
        write_diagnostics_row(diag, s);
        if (s.step == 0 || s.step == steps || (cfg.every > 0 && s.step % cfg.every == 0)) dump(s);
        if (s.step > 0) {
          log << "step " << s.step << "/" << steps << " t=" << s.time << " F=" << s.diag.energy.total
              << " newton=" << s.diag.newton_iterations << '\n';
        }
      });
      report["steps"] = steps;
      report["final_mass_drift"] = res.mass_drift;
      report["max_energy_increase"] = res.max_energy_increase;
      report["initial_energy"] = res.initial.diag.energy.total;
      report["final_energy"] = res.final_state.diag.energy.total;
      int newton = 0;
      for (const auto& d : res.history) newton += d.newton_iterations;
      report["newton_iterations"] = newton;
      report["probes"] = probes_json(probe(cfg, res.initial.c.space->mesh()));
      break;
    }
    case RunMode::VerifyMms: {
      report["mode"] = "verify-mms";
      const ConvergenceTable table = verify_mms(cfg);
      std::ofstream csv = open_output(cfg.out_dir / "convergence.csv");
      table.write_csv(csv);
      report["study"] = cfg.mms_study == MmsStudy::Spatial ? "spatial" : "temporal";
      report["mms"] = {{"kappa", cfg.mms_kappa},
                       {"mu_s", cfg.mms_mu_s},
                       {"sigma", mms_options(cfg).sigma}};
      json rows = json::array();
      double drift = 0.0;
      for (const auto& r : table.rows) {
        rows.push_back({{"n", r.n}, {"h", r.h}, {"tau", r.tau}, {"steps", r.steps},
                        {"err_c_dg", r.err_c_dg}, {"err_v_l2", r.err_v_l2},
                        {"err_v_dg_acc", r.err_v_dg_acc}, {"err_mu_dg_acc", r.err_mu_dg_acc},
                        {"seconds", r.seconds}});
        drift = std::max(drift, r.max_mass_drift);
        log << "n=" << r.n << " tau=" << r.tau << " err_c_dg=" << r.err_c_dg << " err_v_l2=" << r.err_v_l2
            << " (" << r.seconds << " s)\n";
      }
      report["rows"] = rows;
      json eoc;
      for (const char* col : ConvergenceTable::kErrorColumns) {
        eoc[std::string(col).replace(0, 3, "eoc")] = eoc_json(table.eoc(col));
      }
      report["eoc"] = eoc;
      report["final_mass_drift"] = drift;
      report["max_energy_increase"] = nullptr;  // forced runs need not dissipate
      const int coarsest = table.rows.empty() ? 4 : table.rows.front().n;
      report["probes"] = probes_json(probe(cfg, structured_unit_square(coarsest)));
      break;
    }
    case RunMode::ProbeConstants: {
      report["mode"] = "probe-constants";
      auto mesh = make_mesh(cfg);
      const auto p = probe(cfg, *mesh);
      if (!p) {
        throw ConfigError("mesh.n", "probe-constants is limited to " + std::to_string(kProbeElementLimit) +
                                        " elements (dense eigensolves)");
      }
      report["probes"] = probes_json(p);
      log << "k_alpha=" << p->k_alpha << " k_eps=" << p->k_eps << " beta_h=" << p->beta
          << " c_gamma=" << p->c_gamma << '\n';
      break;
    }
  }
  report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(cfg.out_dir / "report.json", report);
}

}  // namespace chns
