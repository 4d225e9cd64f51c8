#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "chns/driver.hpp"
#include "chns/errors.hpp"

namespace py = pybind11;
using namespace chns;

namespace {

py::array_t<double> to_numpy(const Eigen::VectorXd& v) {
  py::array_t<double> out(v.size());
  std::copy(v.data(), v.data() + v.size(), out.mutable_data());
  return out;
}

py::dict state_dict(const TimeStepState& s) {
  py::dict d;
  d["step"] = s.step;
  d["time"] = s.time;
  d["c"] = to_numpy(s.c.coeffs);
  d["mu"] = to_numpy(s.mu.coeffs);
  d["v"] = to_numpy(s.v.coeffs);
  d["p"] = to_numpy(s.p.coeffs);
  return d;
}

py::dict probes_dict(const ConstantProbes& p) {
  py::dict d;
  d["k_alpha"] = p.k_alpha;
  d["k_eps"] = p.k_eps;
  d["beta_h"] = p.beta;
  d["c_gamma"] = p.c_gamma;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DG solver for the Cahn-Hilliard-Navier-Stokes system";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NewtonDivergence>(m, "NewtonDivergence", PyExc_RuntimeError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_RuntimeError);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("set", &RunConfig::set, py::arg("key"), py::arg("value"))
      .def("validate", &RunConfig::validate)
      .def("effective_sigma", &RunConfig::effective_sigma)
      .def_readwrite("mesh_n", &RunConfig::mesh_n)
      .def_readwrite("degree", &RunConfig::degree)
      .def_readwrite("kappa", &RunConfig::kappa)
      .def_readwrite("mu_s", &RunConfig::mu_s)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("t_final", &RunConfig::t_final)
      .def_readwrite("out_dir", &RunConfig::out_dir);

  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

  py::class_<Potential>(m, "Potential")
      .def_static("ginzburg_landau", [] { return Potential::ginzburg_landau(); })
      .def_static("logarithmic", &Potential::logarithmic, py::arg("theta"), py::arg("theta_c"),
                  py::arg("delta_trunc") = 0.05)
      .def_property_readonly("name", &Potential::name)
      .def("phi", py::vectorize(&Potential::phi))
      .def("dphi", py::vectorize(&Potential::dphi))
      .def("phi_plus", py::vectorize(&Potential::phi_plus))
      .def("phi_minus", py::vectorize(&Potential::phi_minus))
      .def("dphi_plus", py::vectorize(&Potential::dphi_plus))
      .def("dphi_minus", py::vectorize(&Potential::dphi_minus))
      .def("d2phi_plus", py::vectorize(&Potential::d2phi_plus))
      .def("d2phi_minus", py::vectorize(&Potential::d2phi_minus));

  m.def(
      "simulate",
      [](const RunConfig& cfg) {
        SimulationResult res;
        {
          py::gil_scoped_release release;
          res = simulate(cfg);
        }
        const std::size_t n = res.history.size();
        py::dict hist;
        const char* names[] = {"mass", "F_total", "F_kinetic", "F_chemical", "F_interfacial", "mu_dg", "v_dg"};
        std::vector<py::array_t<double>> cols;
        for (int j = 0; j < 7; ++j) cols.emplace_back(n);
        py::array_t<int> newton(n);
        for (std::size_t k = 0; k < n; ++k) {
          const StepDiagnostics& d = res.history[k];
          const double vals[] = {d.mass, d.energy.total, d.energy.kinetic, d.energy.chemical,
                                 d.energy.interfacial, d.mu_dg, d.v_dg};
          for (int j = 0; j < 7; ++j) cols[j].mutable_at(k) = vals[j];
          newton.mutable_at(k) = d.newton_iterations;
        }
        for (int j = 0; j < 7; ++j) hist[names[j]] = cols[j];
        hist["newton_iters"] = newton;
        py::dict out;
        out["history"] = hist;
        out["initial"] = state_dict(res.initial);
        out["final"] = state_dict(res.final_state);
        out["mass_drift"] = res.mass_drift;
        out["max_energy_increase"] = res.max_energy_increase;
        return out;
      },
      py::arg("config"), "Runs the configured simulation and returns diagnostics and the final fields.");

  m.def(
      "verify_mms",
      [](const RunConfig& cfg) {
        ConvergenceTable t;
        {
          py::gil_scoped_release release;
          t = verify_mms(cfg);
        }
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["n"] = r.n;
          d["h"] = r.h;
          d["tau"] = r.tau;
          d["steps"] = r.steps;
          d["err_c_dg"] = r.err_c_dg;
          d["err_v_l2"] = r.err_v_l2;
          d["err_v_dg_acc"] = r.err_v_dg_acc;
          d["err_mu_dg_acc"] = r.err_mu_dg_acc;
          d["max_mass_drift"] = r.max_mass_drift;
          rows.append(d);
        }
        py::dict eoc;
        for (const char* col : ConvergenceTable::kErrorColumns) {
          py::list rates;
          for (const auto& r : t.eoc(col)) rates.append(r ? py::cast(*r) : py::none());
          eoc[col] = rates;
        }
        std::ostringstream csv;
        t.write_csv(csv);
        py::dict out;
        out["rows"] = rows;
        out["eoc"] = eoc;
        out["csv"] = csv.str();
        return out;
      },
      py::arg("config"), "Manufactured-solution convergence study; eoc keyed by error column.");

  m.def(
      "probe_constants",
      [](int n, int degree, double sigma) {
        RunConfig cfg;
        cfg.mesh_n = n;
        cfg.degree = degree;
        cfg.sigma = sigma;
        cfg.validate();
        const auto p = probe(cfg, *make_mesh(cfg));
        if (!p) throw ConfigError("mesh.n", "mesh too large for the dense probes");
        return probes_dict(*p);
      },
      py::arg("n"), py::arg("degree") = 1, py::arg("sigma") = 0.0,
      "Coercivity, inf-sup and boundedness probes on the structured n x n mesh.");

  m.def(
      "run",
      [](const RunConfig& cfg, bool verbose) {
        py::gil_scoped_release release;
        std::ostringstream sink;
        if (verbose) {
          run(cfg, std::cerr);
        } else {
          run(cfg, sink);
        }
      },
      py::arg("config"), py::arg("verbose") = false, "Runs the configured mode and writes output files.");
}
