#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qphase/charfn.hpp"

namespace qphase {

// Which pairing a distribution or moment refers to:
//   Basis::B  -- thermal state of the physical mode, statistics of the
//                squeezed-coherent quasi-mode ladder (chi_a / w_a),
//   Basis::a  -- thermal state of the quasi-mode, statistics of the
//                physical ladder (chi_b / w_b).
enum class Basis { B, a };

// A^2, B^2, C of the Gaussian quasi-distribution, det = 4 A^2 B^2 - C^2.
// The distribution exists as a normalizable Gaussian iff a2, b2, det > 0.
struct GaussianCoefficients {
  double a2;
  double b2;
  double c;
  double det;
  bool valid;
};

GaussianCoefficients gaussian_coefficients(const StateParams& params, OrderingParam p);

// E(e2) = 2 Im(alpha) + 2 e2,  F(e1) = -2 Re(alpha) - 2 e1.
struct LinearForms {
  double e_form;
  double f_form;
};

LinearForms linear_forms(ComplexAmplitude alpha, ComplexAmplitude eta);

double w_a_closed(ComplexAmplitude eta, const StateParams& params, OrderingParam p);
double w_b_closed(ComplexAmplitude eta, const StateParams& params, OrderingParam p);

// "P", "Wigner", "Q", or "generalized(p)".
std::string classify_distribution(OrderingParam p);

struct QuasiProbGrid {
  PhaseSpaceGrid grid;
  OrderingParam ordering;
  std::vector<double> values;  // row-major: outer index Im (e2), inner Re (e1)

  double value(int i_re, int j_im) const {
    return values[static_cast<std::size_t>(j_im) * grid.n_re + i_re];
  }
  double cell_area() const { return grid.dx() * grid.dy(); }
  double mass() const;  // compensated cell sum times cell area
  double normalization_residual() const { return std::abs(mass() - 1.0); }
};

// Display grid: centered at the distribution peak, extent
// max(6 sigma_max, 4.0); 256 samples per axis, doubled (up to 4096)
// until the narrow principal axis is resolved.
PhaseSpaceGrid default_grid(const StateParams& params, OrderingParam p, Basis basis = Basis::B);

// Quadrature grid for moments: 8 sigma_max, no floor, same resolution rule.
PhaseSpaceGrid moment_grid(const StateParams& params, OrderingParam p, Basis basis = Basis::B);

QuasiProbGrid fill_closed(const PhaseSpaceGrid& grid, const StateParams& params,
                          OrderingParam p, Basis basis = Basis::B);

using ChiFn = std::function<Complex(ComplexAmplitude)>;

// Discrete version of the defining transform
//   W(eta, p) = (1/pi^2) Int d^2xi chi(xi, p) exp(eta xi* - eta* xi).
// xi_grid must be centered at the origin and cover the support of chi
// (checked: |chi| < 1e-12 on the border cells). The returned grid is the
// conjugate eta-grid fixed by the sampling; quasiprob.cpp documents the
// exact index <-> frequency map. Imaginary residue is checked against
// 1e-8 and discarded.
QuasiProbGrid fourier_w(const ChiFn& chi, const PhaseSpaceGrid& xi_grid, OrderingParam p);

// xi-grid sized so the border decay check passes for the built-in chi.
PhaseSpaceGrid xi_grid_for(const StateParams& params, OrderingParam p, int n = 256);

// Validity-checked FFT of the built-in chi for either basis.
QuasiProbGrid fourier_w_basis(const StateParams& params, OrderingParam p,
                              Basis basis = Basis::B, int n = 256);

}  // namespace qphase
