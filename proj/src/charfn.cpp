#include "qphase/charfn.hpp"

#include <cmath>

namespace qphase {

ChiQuadratic chi_quadratic(const StateParams& params, OrderingParam p) {
  const double m = params.thermal.n_bar + 0.5;
  const double u = m * std::cosh(2.0 * params.squeeze.r);
  const double v = m * std::sinh(2.0 * params.squeeze.r);
  const double cp = std::cos(params.squeeze.phi);
  const double sp = std::sin(params.squeeze.phi);
  return {u - v * cp - 0.5 * p.p, u + v * cp - 0.5 * p.p, 2.0 * v * sp};
}

Complex chi_thermal(ComplexAmplitude xi, double n_bar, OrderingParam p) {
  require_finite(xi, "xi");
  ThermalParam t(n_bar);  // validates
  const double coeff = t.n_bar + 0.5 - 0.5 * p.p;
  return {std::exp(-coeff * std::norm(xi)), 0.0};
}

Complex chi_a(ComplexAmplitude xi, const StateParams& params, OrderingParam p) {
  require_finite(xi, "xi");
  const ChiQuadratic q = chi_quadratic(params, p);
  const double x = xi.real(), y = xi.imag();
  const double gauss = std::exp(-(q.a2 * x * x + q.b2 * y * y - q.c * x * y));
  // xi* alpha - xi alpha* = 2i (Im(alpha) x - Re(alpha) y): a pure phase,
  // which is why |chi_a| is independent of alpha.
  const double phase = 2.0 * (params.alpha.imag() * x - params.alpha.real() * y);
  return std::polar(gauss, phase);
}

StateParams transform_params(const StateParams& params) {
  const double r = params.squeeze.r;
  const Complex a = params.alpha;
  const Complex ap = -(a * std::cosh(r) -
                       std::conj(a) * std::sinh(r) * std::polar(1.0, params.squeeze.phi));
  return StateParams(ap, SqueezeParam(r, params.squeeze.phi + M_PI), params.thermal);
}

Complex chi_b(ComplexAmplitude xi, const StateParams& params, OrderingParam p) {
  return chi_a(xi, transform_params(params), p);
}

namespace {

using LComplex = std::complex<long double>;

// chi_a's closed form with every intermediate held in long double.
struct ExtendedChi {
  long double a2, b2, c, lin_x, lin_y;

  LComplex operator()(long double x, long double y) const {
    const long double gauss = std::exp(-(a2 * x * x + b2 * y * y - c * x * y));
    const long double phase = lin_x * x + lin_y * y;
    return {gauss * std::cos(phase), gauss * std::sin(phase)};
  }
};

ExtendedChi make_extended(const StateParams& params, OrderingParam p) {
  const long double m = static_cast<long double>(params.thermal.n_bar) + 0.5L;
  const long double r = params.squeeze.r;
  const long double phi = params.squeeze.phi;
  const long double u = m * std::cosh(2.0L * r);
  const long double v = m * std::sinh(2.0L * r);
  ExtendedChi chi;
  chi.a2 = u - v * std::cos(phi) - 0.5L * static_cast<long double>(p.p);
  chi.b2 = u + v * std::cos(phi) - 0.5L * static_cast<long double>(p.p);
  chi.c = 2.0L * v * std::sin(phi);
  chi.lin_x = 2.0L * static_cast<long double>(params.alpha.imag());
  chi.lin_y = -2.0L * static_cast<long double>(params.alpha.real());
  return chi;
}

}  // namespace

ChiFnL chi_a_extended(const StateParams& params, OrderingParam p) {
  return make_extended(params, p);
}

ChiFnL chi_b_extended(const StateParams& params, OrderingParam p) {
  return make_extended(transform_params(params), p);
}

}  // namespace qphase
