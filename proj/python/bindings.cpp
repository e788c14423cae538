#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "yledge/linalg.hpp"
#include "yledge/studies.hpp"

namespace py = pybind11;
using namespace yledge;

namespace {

ModelParams make_params(int n, double g, double m, double alpha, double h_x, const std::string& bc,
                        const std::string& model, double J, double h_z) {
  ModelParams p;
  p.model = model_from_string(model);
  p.n = n;
  p.g = g;
  p.m = m;
  p.alpha = alpha;
  p.h_x = h_x;
  p.bc = boundary_from_string(bc);
  p.J = J;
  p.h_z = h_z;
  p.validate();
  return p;
}

#define PARAM_ARGS                                                                                       \
  py::arg("n"), py::arg("g") = 0.0, py::arg("m") = 0.0, py::arg("alpha") = kPi / 2, py::arg("h_x") = 1.0, \
      py::arg("bc") = "periodic", py::arg("model") = "pxp", py::arg("J") = 1.0, py::arg("h_z") = 0.0

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Exact diagonalization of the non-Hermitian detuned PXP chain";

  py::register_exception<InvalidInput>(mod, "InvalidInput", PyExc_ValueError);
  py::register_exception<UnsupportedRegime>(mod, "UnsupportedRegime", PyExc_RuntimeError);
  py::register_exception<ExceptionalPointError>(mod, "ExceptionalPointError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  mod.def("eigensolver", &linalg::backend_name);

  mod.def(
      "basis",
      [](int n, const std::string& bc) {
        const auto b = enumerate_basis(n, boundary_from_string(bc));
        return std::vector<Word>(b.states().begin(), b.states().end());
      },
      py::arg("n"), py::arg("bc") = "periodic");

  mod.def(
      "hamiltonian",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z, int k) {
        const auto p = make_params(n, g, m, alpha, h_x, bc, model, J, h_z);
        ChainSystem sys(p.n, p.bc);
        return k < 0 ? sys.full_matrix(p) : sys.sector_matrix(p, k);
      },
      PARAM_ARGS, py::arg("k") = -1);

  mod.def(
      "spectrum",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z, int k) {
        const auto p = make_params(n, g, m, alpha, h_x, bc, model, J, h_z);
        ChainSystem sys(p.n, p.bc);
        const CVector ev = linalg::eigenvalues(k < 0 ? sys.full_matrix(p) : sys.sector_matrix(p, k));
        std::vector<std::size_t> order = spectral_order(ev);
        CVector sorted(ev.size());
        for (std::size_t i = 0; i < order.size(); ++i) sorted[static_cast<Eigen::Index>(i)] = ev[order[i]];
        return sorted;
      },
      PARAM_ARGS, py::arg("k") = -1);

  mod.def(
      "ground_entropy",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z) {
        const auto p = make_params(n, g, m, alpha, h_x, bc, model, J, h_z);
        ChainSystem sys(p.n, p.bc);
        return ground_entropy(p, sys);
      },
      PARAM_ARGS);

  mod.def(
      "classify_phase",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z) {
        const auto l = classify_phase(make_params(n, g, m, alpha, h_x, bc, model, J, h_z));
        py::dict d;
        d["label"] = to_string(l.label);
        d["boundary"] = l.boundary;
        d["exceptional_point"] = l.exceptional_point;
        d["max_imag"] = l.report.max_imag;
        d["gap"] = l.gap;
        return d;
      },
      PARAM_ARGS);

  mod.def(
      "fidelity_susceptibility",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z, double dm, const std::string& kind) {
        return fidelity_susceptibility(make_params(n, g, m, alpha, h_x, bc, model, J, h_z), dm,
                                       fidelity_kind_from_string(kind))
            .chi;
      },
      PARAM_ARGS, py::arg("dm") = 1e-4, py::arg("kind") = "rl");

  mod.def(
      "echo",
      [](int n, double g, double m, double alpha, double h_x, const std::string& bc, const std::string& model,
         double J, double h_z, double dm, double t_max, double dt, const std::string& kind) {
        QuenchSpec q;
        q.params = make_params(n, g, m, alpha, h_x, bc, model, J, h_z);
        q.m_f = m + dm;
        q.t_max = t_max;
        q.dt = dt;
        q.T = t_max;
        q.validate();
        EchoSeries s;
        switch (echo_kind_from_string(kind)) {
          case EchoKind::biorthogonal: s = biorthogonal_echo(q); break;
          case EchoKind::associated: s = associated_echo(q); break;
          case EchoKind::self_normal: s = self_normal_echo(q); break;
        }
        return py::make_tuple(s.t, s.values);
      },
      PARAM_ARGS, py::arg("dm") = 0.01, py::arg("t_max") = 10.0, py::arg("dt") = 0.1, py::arg("kind") = "biortho");

  mod.def(
      "fit_scaling",
      [](const std::vector<double>& x, const std::vector<double>& y, const std::string& family) {
        const auto f = fit_scaling(x, y, fit_family_from_string(family));
        py::dict d;
        d["family"] = to_string(f.family);
        d["exponent"] = f.exponent;
        d["amplitude"] = f.amplitude;
        d["offset"] = f.offset;
        d["se_exponent"] = f.se_exponent;
        d["se_amplitude"] = f.se_amplitude;
        d["se_offset"] = f.se_offset;
        d["residual_rms"] = f.residual_rms;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("family") = "power");
}
