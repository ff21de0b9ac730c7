#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <optional>
#include <string>

#include "qphase/charfn.hpp"
#include "qphase/core.hpp"
#include "qphase/errors.hpp"
#include "qphase/fockoracle.hpp"
#include "qphase/io.hpp"
#include "qphase/moments.hpp"
#include "qphase/quasiprob.hpp"
#include "qphase/verify.hpp"
#include "qphase/version.hpp"

namespace py = pybind11;
using namespace qphase;

namespace {

std::string repr_params(const StateParams& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "StateParams(alpha=(%.17g%+.17gj), r=%.17g, phi=%.17g, nbar=%.17g)",
                s.alpha.real(), s.alpha.imag(), s.squeeze.r, s.squeeze.phi, s.thermal.n_bar);
  return buf;
}

py::array_t<double> grid_values(const QuasiProbGrid& g) {
  py::array_t<double> out({g.grid.n_im, g.grid.n_re});
  double* dst = out.mutable_data();
  std::copy(g.values.begin(), g.values.end(), dst);
  return out;
}

py::array_t<double> axis_re(const PhaseSpaceGrid& g) {
  py::array_t<double> out(g.n_re);
  double* dst = out.mutable_data();
  for (int i = 0; i < g.n_re; ++i) dst[i] = g.x(i);
  return out;
}

py::array_t<double> axis_im(const PhaseSpaceGrid& g) {
  py::array_t<double> out(g.n_im);
  double* dst = out.mutable_data();
  for (int j = 0; j < g.n_im; ++j) dst[j] = g.y(j);
  return out;
}

// Finite-difference moments bind to the built-in characteristic functions;
// the extended-precision evaluators are what keeps order-3/4 stencils above
// the round-off floor, and a Python callable could only offer doubles.
Complex fd_builtin(const StateParams& s, int m, int n, OrderingParam p, Basis basis,
                   std::optional<double> step) {
  ChiFnL chi = (basis == Basis::B) ? chi_a_extended(s, p) : chi_b_extended(s, p);
  py::gil_scoped_release nogil;
  return step ? moment_fd(chi, m, n, p, *step) : moment_fd(chi, m, n, p);
}

py::dict report_dict(const MomentReport& r) {
  py::dict d;
  d["mean"] = r.mean;
  d["second_combination"] = r.second_combination;
  d["variance_p1"] = r.variance_p1 ? py::cast(*r.variance_p1) : py::none();
  d["method"] = r.method;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qphase, m) {
  m.doc() = "Phase-space distributions of a displaced squeezed thermal mode";
  m.attr("__version__") = kVersion;

  py::register_exception<SingularDistributionError>(m, "SingularDistributionError");
  py::register_exception<GridSupportError>(m, "GridSupportError");
  py::register_exception<GridResolutionError>(m, "GridResolutionError");
  py::register_exception<OracleCapError>(m, "OracleCapError");
  py::register_exception<NumericalHealthError>(m, "NumericalHealthError");

  // Registered last among the translators so it runs first: the suggested
  // cutoff lives in a field the generic translator would drop.
  static auto cutoff_exc = py::register_exception<CutoffError>(m, "CutoffError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CutoffError& e) {
      std::string msg(e.what());
      if (e.suggested_cutoff > 0)
        msg += " (suggested cutoff: " + std::to_string(e.suggested_cutoff) + ")";
      py::set_error(cutoff_exc, msg.c_str());
    }
  });

  py::enum_<Basis>(m, "Basis", "Which state/ladder pairing a quantity refers to")
      .value("B", Basis::B)
      .value("a", Basis::a);

  py::class_<OrderingParam>(m, "OrderingParam")
      .def(py::init<double>(), py::arg("p"))
      .def_readonly("p", &OrderingParam::p)
      .def("__repr__",
           [](const OrderingParam& o) { return "OrderingParam(" + format_g17(o.p) + ")"; });
  py::implicitly_convertible<py::float_, OrderingParam>();
  py::implicitly_convertible<py::int_, OrderingParam>();

  py::class_<SqueezeParam>(m, "SqueezeParam")
      .def(py::init<double, double>(), py::arg("r") = 0.0, py::arg("phi") = 0.0)
      .def_readonly("r", &SqueezeParam::r)
      .def_readonly("phi", &SqueezeParam::phi)
      .def_property_readonly("zeta", &SqueezeParam::zeta);

  py::class_<ThermalParam>(m, "ThermalParam")
      .def(py::init<double>(), py::arg("nbar"))
      .def_static("from_theta", &ThermalParam::from_theta, py::arg("theta"))
      .def_property_readonly("nbar", [](const ThermalParam& t) { return t.n_bar; })
      .def("theta", &ThermalParam::theta);

  py::class_<StateParams>(m, "StateParams")
      .def(py::init([](Complex alpha, double r, double phi, double nbar) {
             return StateParams(alpha, SqueezeParam(r, phi), ThermalParam(nbar));
           }),
           py::arg("alpha") = Complex(0.0, 0.0), py::arg("r") = 0.0, py::arg("phi") = 0.0,
           py::arg("nbar") = 0.0)
      .def(py::init<ComplexAmplitude, SqueezeParam, ThermalParam>(), py::arg("alpha"),
           py::arg("squeeze"), py::arg("thermal"))
      .def_readonly("alpha", &StateParams::alpha)
      .def_readonly("squeeze", &StateParams::squeeze)
      .def_readonly("thermal", &StateParams::thermal)
      .def_property_readonly("r", [](const StateParams& s) { return s.squeeze.r; })
      .def_property_readonly("phi", [](const StateParams& s) { return s.squeeze.phi; })
      .def_property_readonly("nbar", [](const StateParams& s) { return s.thermal.n_bar; })
      .def("__repr__", &repr_params);

  py::class_<PhaseSpaceGrid>(m, "PhaseSpaceGrid")
      .def(py::init<>())
      .def(py::init<ComplexAmplitude, double, double, int, int>(), py::arg("center"),
           py::arg("half_extent_re"), py::arg("half_extent_im"), py::arg("n_re"),
           py::arg("n_im"))
      .def_readonly("center", &PhaseSpaceGrid::center)
      .def_readonly("half_extent_re", &PhaseSpaceGrid::half_extent_re)
      .def_readonly("half_extent_im", &PhaseSpaceGrid::half_extent_im)
      .def_readonly("n_re", &PhaseSpaceGrid::n_re)
      .def_readonly("n_im", &PhaseSpaceGrid::n_im)
      .def_property_readonly("dx", &PhaseSpaceGrid::dx)
      .def_property_readonly("dy", &PhaseSpaceGrid::dy)
      .def("x", &PhaseSpaceGrid::x, py::arg("i"))
      .def("y", &PhaseSpaceGrid::y, py::arg("j"))
      .def("point", &PhaseSpaceGrid::point, py::arg("i"), py::arg("j"))
      .def_property_readonly("axis_re", &axis_re)
      .def_property_readonly("axis_im", &axis_im);

  py::class_<ChiQuadratic>(m, "ChiQuadratic")
      .def_readonly("a2", &ChiQuadratic::a2)
      .def_readonly("b2", &ChiQuadratic::b2)
      .def_readonly("c", &ChiQuadratic::c);

  py::class_<GaussianCoefficients>(m, "GaussianCoefficients")
      .def_readonly("a2", &GaussianCoefficients::a2)
      .def_readonly("b2", &GaussianCoefficients::b2)
      .def_readonly("c", &GaussianCoefficients::c)
      .def_readonly("det", &GaussianCoefficients::det)
      .def_readonly("valid", &GaussianCoefficients::valid)
      .def("__repr__", [](const GaussianCoefficients& g) {
        return "GaussianCoefficients(a2=" + format_g17(g.a2) + ", b2=" + format_g17(g.b2) +
               ", c=" + format_g17(g.c) + ", det=" + format_g17(g.det) +
               ", valid=" + (g.valid ? std::string("True") : std::string("False")) + ")";
      });

  py::class_<QuasiProbGrid>(m, "QuasiProbGrid")
      .def_readonly("grid", &QuasiProbGrid::grid)
      .def_property_readonly("ordering",
                             [](const QuasiProbGrid& g) { return g.ordering.p; })
      .def_property_readonly("values", &grid_values,
                             "2-d array, rows indexed by Im(eta), columns by Re(eta)")
      .def("value", &QuasiProbGrid::value, py::arg("i_re"), py::arg("j_im"))
      .def_property_readonly("cell_area", &QuasiProbGrid::cell_area)
      .def("mass", &QuasiProbGrid::mass)
      .def("normalization_residual", &QuasiProbGrid::normalization_residual);

  // thermal occupation <-> reciprocal-temperature views
  m.def("nbar_from_theta", &nbar_from_theta, py::arg("theta"));
  m.def("theta_from_nbar", &theta_from_nbar, py::arg("nbar"));

  // characteristic functions
  m.def("chi_thermal", &chi_thermal, py::arg("xi"), py::arg("nbar"), py::arg("p"));
  m.def("chi_a", &chi_a, py::arg("xi"), py::arg("params"), py::arg("p"));
  m.def("chi_b", &chi_b, py::arg("xi"), py::arg("params"), py::arg("p"));
  m.def("chi_quadratic", &chi_quadratic, py::arg("params"), py::arg("p"));
  m.def("transform_params", &transform_params, py::arg("params"),
        "Parameter map under which chi_a evaluates chi_b and vice versa");

  // closed-form quasi-probabilities
  m.def("gaussian_coefficients", &gaussian_coefficients, py::arg("params"), py::arg("p"));
  m.def("classify_distribution", &classify_distribution, py::arg("p"));
  m.def("w_a", &w_a_closed, py::arg("eta"), py::arg("params"), py::arg("p"));
  m.def("w_b", &w_b_closed, py::arg("eta"), py::arg("params"), py::arg("p"));

  // grids
  m.def("default_grid", &default_grid, py::arg("params"), py::arg("p"),
        py::arg("basis") = Basis::B);
  m.def("moment_grid", &moment_grid, py::arg("params"), py::arg("p"),
        py::arg("basis") = Basis::B);
  m.def("xi_grid_for", &xi_grid_for, py::arg("params"), py::arg("p"), py::arg("n") = 256);
  m.def("fill_closed", &fill_closed, py::arg("grid"), py::arg("params"), py::arg("p"),
        py::arg("basis") = Basis::B, py::call_guard<py::gil_scoped_release>());
  m.def(
      "closed_grid",
      [](const StateParams& s, OrderingParam p, Basis basis) {
        py::gil_scoped_release nogil;
        return fill_closed(default_grid(s, p, basis), s, p, basis);
      },
      py::arg("params"), py::arg("p"), py::arg("basis") = Basis::B,
      "fill_closed on the default display grid");
  m.def("fourier_w_basis", &fourier_w_basis, py::arg("params"), py::arg("p"),
        py::arg("basis") = Basis::B, py::arg("n") = 256,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "fourier_w",
      [](py::function chi, const PhaseSpaceGrid& xi_grid, OrderingParam p) {
        ChiFn fn = [chi](ComplexAmplitude xi) { return chi(xi).cast<Complex>(); };
        return fourier_w(fn, xi_grid, p);
      },
      py::arg("chi"), py::arg("xi_grid"), py::arg("p"),
      "Discrete transform of an arbitrary callable; the callable runs under the GIL");

  // moments
  m.def("mean_number_B", &mean_number_B, py::arg("params"), py::arg("p"));
  m.def("mean_number_a", &mean_number_a, py::arg("params"), py::arg("p"));
  m.def("variance_combination_B", &variance_combination_B, py::arg("params"), py::arg("p"));
  m.def("variance_combination_a", &variance_combination_a, py::arg("params"), py::arg("p"));
  m.def("variance_p1", &variance_p1, py::arg("params"), py::arg("basis") = Basis::B);
  m.def(
      "closed_report",
      [](const StateParams& s, OrderingParam p, Basis basis) {
        return report_dict(closed_report(s, p, basis));
      },
      py::arg("params"), py::arg("p"), py::arg("basis") = Basis::B);
  m.def("moment_fd", &fd_builtin, py::arg("params"), py::arg("m"), py::arg("n"),
        py::arg("p"), py::arg("basis") = Basis::B, py::arg("step") = py::none(),
        "Wirtinger-stencil derivative of the built-in characteristic function at the origin");
  m.def("moment_quadrature", &moment_quadrature, py::arg("w_grid"), py::arg("m"),
        py::arg("n"), py::call_guard<py::gil_scoped_release>());

  // number-basis oracle
  m.def("adaptive_cutoff", &adaptive_cutoff, py::arg("params"), py::arg("tol") = 1e-12,
        py::call_guard<py::gil_scoped_release>());
  m.def("max_oracle_cutoff", &max_oracle_cutoff);
  m.def("safe_block", &safe_block, py::arg("cutoff"));
  m.def(
      "oracle_chi",
      [](const StateParams& s, Complex xi, OrderingParam p, Basis basis, int cutoff) {
        py::gil_scoped_release nogil;
        int n = cutoff > 0 ? cutoff : adaptive_cutoff(s, 1e-12);
        FockOperators ops = build_operators(s, n);
        OracleValue v = (basis == Basis::B)
                            ? qphase::oracle_chi(rho_a(s.thermal.n_bar, n), ops.b_mat,
                                                 ops.bdag_mat, xi, p)
                            : qphase::oracle_chi(rho_b(s, n), ops.a_mat, ops.adag_mat, xi, p);
        return std::make_pair(v.value, v.trusted);
      },
      py::arg("params"), py::arg("xi"), py::arg("p"), py::arg("basis") = Basis::B,
      py::arg("cutoff") = 0,
      "Truncated trace evaluation of the characteristic function; returns (value, trusted). "
      "cutoff <= 0 picks adaptive_cutoff(params, 1e-12)");
  m.def(
      "oracle_moments",
      [](const StateParams& s, Basis basis, int cutoff) {
        py::gil_scoped_release nogil;
        int n = cutoff > 0 ? cutoff : adaptive_cutoff(s, 1e-12);
        FockOperators ops = build_operators(s, n);
        Eigen::MatrixXcd numop;
        DensityMatrix rho{Eigen::MatrixXcd(), ""};
        if (basis == Basis::B) {
          numop = ops.bdag_mat * ops.b_mat;
          rho = rho_a(s.thermal.n_bar, n);
        } else {
          numop = ops.adag_mat * ops.a_mat;
          rho = rho_b(s, n);
        }
        return std::make_pair(oracle_moment(rho, numop, 1), oracle_moment(rho, numop, 2));
      },
      py::arg("params"), py::arg("basis") = Basis::B, py::arg("cutoff") = 0,
      "First and second moments of the relevant number operator from the truncated trace");

  // self-verification
  m.def(
      "verify_suite",
      [](int draws, int xi_per_draw, std::uint64_t seed, bool quick, bool flip_c_sign) {
        VerifyOptions o;
        o.draws = draws;
        o.xi_per_draw = xi_per_draw;
        o.seed = seed;
        o.quick = quick;
        o.flip_c_sign = flip_c_sign;
        VerifyReport r;
        {
          py::gil_scoped_release nogil;
          r = run_suite(o);
        }
        py::list checks;
        for (const CheckResult& c : r.checks) {
          py::dict d;
          d["name"] = c.name;
          d["pass"] = c.pass;
          d["worst"] = c.worst;
          d["tol"] = c.tol;
          d["cases"] = c.cases;
          d["note"] = c.note;
          checks.append(d);
        }
        py::dict out;
        out["pass"] = r.pass;
        out["checks"] = checks;
        out["summary"] = render_summary(r, o);
        return out;
      },
      py::arg("draws") = 20, py::arg("xi_per_draw") = 10, py::arg("seed") = 12345,
      py::arg("quick") = false, py::arg("flip_c_sign") = false);
}
