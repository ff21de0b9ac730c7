#include "qphase/quasiprob.hpp"

#include <fftw3.h>

#include <charconv>
#include <complex>

namespace qphase {

GaussianCoefficients gaussian_coefficients(const StateParams& params, OrderingParam p) {
  const ChiQuadratic q = chi_quadratic(params, p);
  const double det = 4.0 * q.a2 * q.b2 - q.c * q.c;
  const bool valid = q.a2 > 0.0 && q.b2 > 0.0 && det > 0.0;
  return {q.a2, q.b2, q.c, det, valid};
}

LinearForms linear_forms(ComplexAmplitude alpha, ComplexAmplitude eta) {
  return {2.0 * alpha.imag() + 2.0 * eta.imag(), -2.0 * alpha.real() - 2.0 * eta.real()};
}

namespace {

void require_valid(const GaussianCoefficients& g) {
  if (!g.valid) {
    throw SingularDistributionError(
        "quasi-distribution not a normalizable Gaussian at this p");
  }
}

double w_from_coefficients(const GaussianCoefficients& g, ComplexAmplitude alpha,
                           ComplexAmplitude eta) {
  const LinearForms lf = linear_forms(alpha, eta);
  const double e = lf.e_form, f = lf.f_form;
  const double quad = (g.a2 * f * f + g.b2 * e * e + g.c * e * f) / g.det;
  return 2.0 / (M_PI * std::sqrt(g.det)) * std::exp(-quad);
}

// Eigenvalues of the quadratic-form matrix [[a2, -c/2], [-c/2, b2]];
// principal variances of W are half of these.
void quad_eigenvalues(const GaussianCoefficients& g, double& lam_min, double& lam_max) {
  const double mid = 0.5 * (g.a2 + g.b2);
  const double rad = std::hypot(0.5 * (g.a2 - g.b2), 0.5 * g.c);
  lam_min = mid - rad;
  lam_max = mid + rad;
}

double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, comp = 0.0;
  for (double x : xs) {
    double y = x - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

double w_a_closed(ComplexAmplitude eta, const StateParams& params, OrderingParam p) {
  require_finite(eta, "eta");
  const GaussianCoefficients g = gaussian_coefficients(params, p);
  require_valid(g);
  return w_from_coefficients(g, params.alpha, eta);
}

double w_b_closed(ComplexAmplitude eta, const StateParams& params, OrderingParam p) {
  return w_a_closed(eta, transform_params(params), p);
}

std::string classify_distribution(OrderingParam p) {
  if (p.p == 1.0) return "P";
  if (p.p == 0.0) return "Wigner";
  if (p.p == -1.0) return "Q";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), p.p, std::chars_format::general, 17);
  return "generalized(" + std::string(buf, res.ptr) + ")";
}

double QuasiProbGrid::mass() const { return kahan_sum(values) * cell_area(); }

namespace {

PhaseSpaceGrid sigma_grid(const StateParams& params, OrderingParam p, Basis basis,
                          double sigmas, double extent_floor) {
  const StateParams eff = basis == Basis::B ? params : transform_params(params);
  const GaussianCoefficients g = gaussian_coefficients(eff, p);
  require_valid(g);
  double lam_min, lam_max;
  quad_eigenvalues(g, lam_min, lam_max);
  const double sigma_max = std::sqrt(0.5 * lam_max);
  const double sigma_min = std::sqrt(0.5 * lam_min);
  const double extent = std::max(sigmas * sigma_max, extent_floor);
  int n = 256;
  while (2.0 * extent / n > sigma_min / 1.5 && n < 4096) n *= 2;
  return PhaseSpaceGrid(-eff.alpha, extent, extent, n, n);
}

}  // namespace

PhaseSpaceGrid default_grid(const StateParams& params, OrderingParam p, Basis basis) {
  return sigma_grid(params, p, basis, 6.0, 4.0);
}

PhaseSpaceGrid moment_grid(const StateParams& params, OrderingParam p, Basis basis) {
  return sigma_grid(params, p, basis, 8.0, 0.0);
}

QuasiProbGrid fill_closed(const PhaseSpaceGrid& grid, const StateParams& params,
                          OrderingParam p, Basis basis) {
  const StateParams eff = basis == Basis::B ? params : transform_params(params);
  const GaussianCoefficients g = gaussian_coefficients(eff, p);
  require_valid(g);
  QuasiProbGrid out{grid, p, {}};
  out.values.resize(static_cast<std::size_t>(grid.n_re) * grid.n_im);
  for (int j = 0; j < grid.n_im; ++j) {
    for (int i = 0; i < grid.n_re; ++i) {
      out.values[static_cast<std::size_t>(j) * grid.n_re + i] =
          w_from_coefficients(g, eff.alpha, grid.point(i, j));
    }
  }
  return out;
}

// Discretization of W(eta) = (1/pi^2) Int chi(xi) e^{eta xi* - eta* xi} d^2xi.
//
// With xi = x + iy, eta = e1 + i e2 the kernel is exp(2i (x e2 - y e1)).
// Cell-centered samples x_j = (j + 1/2) dx - Lx, y_k = (k + 1/2) dy - Ly
// turn the Riemann sum into two 1-D DFTs once the output grid is chosen as
//   e1_m = (m + 1/2) de1 - E1,  de1 = pi / (Ny dy),  E1 = pi / (2 dy),
//   e2_n = (n + 1/2) de2 - E2,  de2 = pi / (Nx dx),  E2 = pi / (2 dx),
// because then 2 dy de1 = 2 pi / Ny and 2 dx de2 = 2 pi / Nx. The y -> e1
// pass is a forward DFT (kernel e^{-2 pi i k m / Ny}) with the twiddles
//   pre_k  = e^{-2 i k dy e1_0},  post_m = e^{-2 i y_0 e1_m},
// and the x -> e2 pass is an unnormalized backward DFT with
//   pre_j  = e^{+2 i j dx e2_0},  post_n = e^{+2 i x_0 e2_n}.
// The overall scale is dx dy / pi^2. Verified against the vacuum case and
// a brute-force double sum in the unit tests before anything else.
QuasiProbGrid fourier_w(const ChiFn& chi, const PhaseSpaceGrid& xi_grid, OrderingParam p) {
  if (xi_grid.center != Complex(0.0, 0.0)) {
    throw std::invalid_argument("characteristic-function grid must be centered at the origin");
  }
  const int nx = xi_grid.n_re, ny = xi_grid.n_im;
  const double dx = xi_grid.dx(), dy = xi_grid.dy();

  std::vector<Complex> buf(static_cast<std::size_t>(nx) * ny);
  auto* fbuf = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan rows = fftw_plan_many_dft(1, &ny, nx, fbuf, nullptr, 1, ny, fbuf, nullptr, 1, ny,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan cols = fftw_plan_many_dft(1, &nx, ny, fbuf, nullptr, ny, 1, fbuf, nullptr, ny, 1,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);

  // buf[j * ny + k] = chi(x_j + i y_k)
  double border_max = 0.0;
  for (int j = 0; j < nx; ++j) {
    for (int k = 0; k < ny; ++k) {
      const Complex v = chi(Complex(xi_grid.x(j), xi_grid.y(k)));
      buf[static_cast<std::size_t>(j) * ny + k] = v;
      if (j == 0 || j == nx - 1 || k == 0 || k == ny - 1) {
        border_max = std::max(border_max, std::abs(v));
      }
    }
  }
  if (border_max >= 1e-12) {
    fftw_destroy_plan(rows);
    fftw_destroy_plan(cols);
    throw GridSupportError("xi-grid too small for characteristic function support");
  }

  const double de1 = M_PI / (ny * dy), e1_0 = 0.5 * de1 - M_PI / (2.0 * dy);
  const double de2 = M_PI / (nx * dx), e2_0 = 0.5 * de2 - M_PI / (2.0 * dx);
  const double x0 = xi_grid.x(0), y0 = xi_grid.y(0);

  for (int j = 0; j < nx; ++j) {
    for (int k = 0; k < ny; ++k) {
      buf[static_cast<std::size_t>(j) * ny + k] *= std::polar(1.0, -2.0 * k * dy * e1_0);
    }
  }
  fftw_execute(rows);
  for (int j = 0; j < nx; ++j) {
    const Complex pre_j = std::polar(1.0, 2.0 * j * dx * e2_0);
    for (int m = 0; m < ny; ++m) {
      buf[static_cast<std::size_t>(j) * ny + m] *=
          pre_j * std::polar(1.0, -2.0 * y0 * (e1_0 + m * de1));
    }
  }
  fftw_execute(cols);
  fftw_destroy_plan(rows);
  fftw_destroy_plan(cols);

  const double scale = dx * dy / (M_PI * M_PI);
  // Output: e1 along Re (ny samples), e2 along Im (nx samples); buf[n * ny + m]
  // already matches the row-major (outer Im) storage.
  PhaseSpaceGrid out_grid({0.0, 0.0}, M_PI / (2.0 * dy), M_PI / (2.0 * dx), ny, nx);
  QuasiProbGrid out{out_grid, p, {}};
  out.values.resize(buf.size());
  double worst_im = 0.0;
  for (int n = 0; n < nx; ++n) {
    const Complex post_n = std::polar(1.0, 2.0 * x0 * (e2_0 + n * de2));
    for (int m = 0; m < ny; ++m) {
      const Complex w = buf[static_cast<std::size_t>(n) * ny + m] * post_n * scale;
      worst_im = std::max(worst_im, std::abs(w.imag()));
      out.values[static_cast<std::size_t>(n) * ny + m] = w.real();
    }
  }
  if (worst_im >= 1e-8) {
    throw NumericalHealthError("imaginary residue of the transformed distribution too large");
  }
  return out;
}

PhaseSpaceGrid xi_grid_for(const StateParams& params, OrderingParam p, int n) {
  const GaussianCoefficients g = gaussian_coefficients(params, p);
  require_valid(g);
  double lam_min, lam_max;
  quad_eigenvalues(g, lam_min, lam_max);
  // Border decay |chi| <= exp(-lam_min L^2) < 1e-12 with margin.
  const double extent = std::sqrt(std::log(1e14) / lam_min);
  return PhaseSpaceGrid({0.0, 0.0}, extent, extent, n, n);
}

QuasiProbGrid fourier_w_basis(const StateParams& params, OrderingParam p, Basis basis, int n) {
  const StateParams eff = basis == Basis::B ? params : transform_params(params);
  const PhaseSpaceGrid grid = xi_grid_for(eff, p, n);
  return fourier_w([&eff, p](ComplexAmplitude xi) { return chi_a(xi, eff, p); }, grid, p);
}

}  // namespace qphase
