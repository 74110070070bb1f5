#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optlat/diagnostics.hpp"
#include "optlat/errors.hpp"
#include "optlat/harness.hpp"
#include "optlat/initial.hpp"
#include "optlat/inversion.hpp"
#include "optlat/kinetics.hpp"
#include "optlat/solver.hpp"

namespace py = pybind11;
using namespace optlat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-transport model for ultracold atoms in optical lattices";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<NoConvergence>(m, "NoConvergence", error.ptr());
  py::register_exception<SingularJacobian>(m, "SingularJacobian", error.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", error.ptr());
  py::register_exception<DegenerateFit>(m, "DegenerateFit", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int d, double eps0, double U0, double eta, double tau0, double delta) {
             ModelParams p{d, eps0, U0, eta, tau0, delta};
             p.validate();
             return p;
           }),
           py::arg("d") = 1, py::arg("eps0") = 1.0, py::arg("U0") = 0.0, py::arg("eta") = 1.0,
           py::arg("tau0") = 1.0, py::arg("delta") = 1e-3)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("eps0", &ModelParams::eps0)
      .def_readwrite("U0", &ModelParams::U0)
      .def_readwrite("eta", &ModelParams::eta)
      .def_readwrite("tau0", &ModelParams::tau0)
      .def_readwrite("delta", &ModelParams::delta)
      .def_property_readonly("U", &ModelParams::U);

  py::class_<Multipliers>(m, "Multipliers")
      .def(py::init<double, double>(), py::arg("lambda0") = 0.0, py::arg("lambda1") = 0.0)
      .def_readwrite("lambda0", &Multipliers::lambda0)
      .def_readwrite("lambda1", &Multipliers::lambda1)
      .def("__repr__", [](const Multipliers& l) {
        return "Multipliers(" + std::to_string(l.lambda0) + ", " + std::to_string(l.lambda1) + ")";
      });

  py::class_<MomentPair>(m, "MomentPair")
      .def(py::init<double, double>(), py::arg("n") = 0.0, py::arg("E") = 0.0)
      .def_readwrite("n", &MomentPair::n)
      .def_readwrite("E", &MomentPair::E);

  m.def(
      "moments",
      [](double lambda0, double lambda1, const ModelParams& p, int M) {
        return moments({lambda0, lambda1}, p, {M, p.d});
      },
      py::arg("lambda0"), py::arg("lambda1"), py::arg("params"), py::arg("M") = 64);

  m.def(
      "invert_moments",
      [](double n, double E, const ModelParams& p, int M) {
        return invert_moments({n, E}, p, {M, p.d});
      },
      py::arg("n"), py::arg("E"), py::arg("params"), py::arg("M") = 64);

  m.def(
      "selfconsistent_density",
      [](double mu0, double mu1, const ModelParams& p, int M) {
        return selfconsistent_density({mu0, mu1}, p, {M, p.d});
      },
      py::arg("mu0"), py::arg("mu1"), py::arg("params"), py::arg("M") = 64);

  m.def(
      "jacobian_det",
      [](double mu0, double mu1, const ModelParams& p, int M) {
        return jacobian_det_formula({mu0, mu1}, p, {M, p.d}).det;
      },
      py::arg("mu0"), py::arg("mu1"), py::arg("params"), py::arg("M") = 64);

  m.def(
      "diffusion_matrix",
      [](double lambda0, double lambda1, double tau, const ModelParams& p, int M) {
        return diffusion_matrix({lambda0, lambda1}, tau, p, {M, p.d});
      },
      py::arg("lambda0"), py::arg("lambda1"), py::arg("tau"), py::arg("params"),
      py::arg("M") = 32);

  m.def(
      "fit_decay",
      [](const std::vector<double>& t, const std::vector<double>& e) {
        const DecayFit f = fit_decay(t, e);
        return py::make_tuple(f.rate, f.r_squared);
      },
      py::arg("times"), py::arg("errors"));

  // Runs one of the finite-difference schemes from a preset and returns
  // (x, n, W) at t_final.
  m.def(
      "simulate",
      [](const ModelParams& p, double dt, double t_final, const std::string& preset, int N,
         double W0, const std::string& scheme) {
        InitialSpec spec;
        spec.kind = initial_kind_from_string(preset, &spec.path);
        spec.W0 = W0;
        SolverConfig c;
        c.dt = dt;
        c.t_final = t_final;
        c.scheme = scheme_from_string(scheme);
        State last = [&] {
          py::gil_scoped_release release;
          return run_simulation(spec.make_state(N), p, c).states.back();
        }();
        std::vector<double> x(N);
        for (int i = 0; i < N; ++i) x[i] = last.grid.center(i);
        return py::make_tuple(x, last.n, last.W);
      },
      py::arg("params"), py::arg("dt"), py::arg("t_final"), py::arg("preset") = "step",
      py::arg("N") = 100, py::arg("W0") = 1.0, py::arg("scheme") = "semi_implicit");
}
