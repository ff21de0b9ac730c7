#pragma once

#include <functional>

#include "qphase/core.hpp"

namespace qphase {

// Real coefficients of the quadratic form
//   Q(x, y) = a2 x^2 + b2 y^2 - c x y,   xi = x + i y,
// so that chi(xi) = exp(-Q) * (pure phase). The same a2, b2, c
// parameterize the Gaussian quasi-distribution; this is the single
// source of truth for the covariance.
struct ChiQuadratic {
  double a2;
  double b2;
  double c;
};

ChiQuadratic chi_quadratic(const StateParams& params, OrderingParam p);

Complex chi_thermal(ComplexAmplitude xi, double n_bar, OrderingParam p);
Complex chi_a(ComplexAmplitude xi, const StateParams& params, OrderingParam p);
Complex chi_b(ComplexAmplitude xi, const StateParams& params, OrderingParam p);

// Parameter map alpha -> -(alpha cosh r - alpha* sinh r e^{i phi}),
// zeta -> -zeta (phi shifted by pi, r unchanged); thermal part untouched.
// Carries chi_a into chi_b: chi_b(xi, params, p) is evaluated as
// chi_a(xi, transform_params(params), p), bit for bit.
StateParams transform_params(const StateParams& params);

// Extended-precision evaluator of the same closed form, for
// finite-difference consumers whose noise floor scales like eps/h^4.
using ChiFnL = std::function<std::complex<long double>(long double, long double)>;
ChiFnL chi_a_extended(const StateParams& params, OrderingParam p);
ChiFnL chi_b_extended(const StateParams& params, OrderingParam p);

}  // namespace qphase
