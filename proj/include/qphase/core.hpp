#pragma once

#include <complex>

#include "qphase/errors.hpp"

namespace qphase {

using Complex = std::complex<double>;

// alpha, eta and xi all live in the same dimensionless complex plane.
using ComplexAmplitude = Complex;

void require_finite(double x, const char* what);
void require_finite(Complex z, const char* what);

// zeta = r e^{i phi}. r >= 0; phi kept normalized in [0, 2pi).
struct SqueezeParam {
  double r = 0.0;
  double phi = 0.0;

  SqueezeParam() = default;
  SqueezeParam(double r_, double phi_);

  Complex zeta() const { return std::polar(r, phi); }
};

// Thermal occupation. n_bar is canonical; theta = ln(1 + 1/n_bar) is a
// derived view, so the two can never drift apart.
struct ThermalParam {
  double n_bar = 0.0;

  ThermalParam() = default;
  explicit ThermalParam(double n_bar_);
  static ThermalParam from_theta(double theta);

  double theta() const;  // throws for n_bar = 0 (vacuum limit)
};

struct StateParams {
  ComplexAmplitude alpha{0.0, 0.0};
  SqueezeParam squeeze{};
  ThermalParam thermal{};

  StateParams() = default;
  StateParams(ComplexAmplitude alpha_, SqueezeParam squeeze_, ThermalParam thermal_);
};

// Ordering parameter: p = 1 normal, p = 0 symmetric, p = -1 anti-normal.
// Any finite value is accepted; normalizability at a given p is the
// quasi-probability module's concern.
struct OrderingParam {
  double p = 0.0;

  OrderingParam() = default;
  OrderingParam(double p_);  // implicit by design: plain doubles read naturally
};

// n_bar = 1/(e^theta - 1) and its inverse.
double nbar_from_theta(double theta);
double theta_from_nbar(double n_bar);

// Cell-centered rectangular sampling of a complex plane. Samples sit at
// center - half_extent + (i + 1/2) * spacing, symmetric about center.
// n_re, n_im are powers of two, at least 8.
struct PhaseSpaceGrid {
  ComplexAmplitude center{0.0, 0.0};
  double half_extent_re = 4.0;
  double half_extent_im = 4.0;
  int n_re = 256;
  int n_im = 256;

  PhaseSpaceGrid() = default;
  PhaseSpaceGrid(ComplexAmplitude center_, double half_extent_re_,
                 double half_extent_im_, int n_re_, int n_im_);

  double dx() const { return 2.0 * half_extent_re / n_re; }
  double dy() const { return 2.0 * half_extent_im / n_im; }
  double x(int i) const { return center.real() - half_extent_re + (i + 0.5) * dx(); }
  double y(int j) const { return center.imag() - half_extent_im + (j + 0.5) * dy(); }
  Complex point(int i, int j) const { return {x(i), y(j)}; }
};

}  // namespace qphase
