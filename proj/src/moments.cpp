#include "qphase/moments.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qphase {
namespace {

using CL = std::complex<long double>;

// B = cosh r a + e^{i phi} sinh r a^dag - alpha; the displaced pair under
// single- and double-angle hyperbolics. T_minus also equals -alpha' of
// transform_params.
Complex t_plus(const StateParams& s) {
  return s.alpha * std::cosh(s.squeeze.r) +
         std::conj(s.alpha) * std::sinh(s.squeeze.r) * std::polar(1.0, s.squeeze.phi);
}

Complex t_minus(const StateParams& s) {
  return s.alpha * std::cosh(s.squeeze.r) -
         std::conj(s.alpha) * std::sinh(s.squeeze.r) * std::polar(1.0, s.squeeze.phi);
}

Complex t_double(const StateParams& s) {
  return s.alpha * std::cosh(2.0 * s.squeeze.r) -
         std::conj(s.alpha) * std::sinh(2.0 * s.squeeze.r) * std::polar(1.0, s.squeeze.phi);
}

double norm2(Complex z) { return std::norm(z); }

long double binom(int n, int k) {
  long double v = 1.0L;
  for (int i = 0; i < k; ++i) v = v * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  return v;
}

CL i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0L, 0.0L};
    case 1: return {0.0L, 1.0L};
    case 2: return {-1.0L, 0.0L};
    default: return {0.0L, -1.0L};
  }
}

// Central-difference weights on offsets {-2,...,2}, O(h^2), before the
// 1/h^k factor.
constexpr std::array<std::array<long double, 5>, 5> kStencil = {{
    {0.0L, 0.0L, 1.0L, 0.0L, 0.0L},
    {0.0L, -0.5L, 0.0L, 0.5L, 0.0L},
    {0.0L, 1.0L, -2.0L, 1.0L, 0.0L},
    {-0.5L, 1.0L, 0.0L, -1.0L, 0.5L},
    {1.0L, -4.0L, 6.0L, -4.0L, 1.0L},
}};

struct Lattice {
  std::array<std::array<CL, 5>, 5> f;  // f[ix][iy] = chi((ix-2)h, (iy-2)h)
  long double h;

  Lattice(const ChiFnL& chi, long double step) : h(step) {
    for (int ix = 0; ix < 5; ++ix)
      for (int iy = 0; iy < 5; ++iy)
        f[ix][iy] = chi(static_cast<long double>(ix - 2) * h,
                        static_cast<long double>(iy - 2) * h);
  }

  // d^a/dx^a d^b/dy^b at the origin.
  CL deriv(int a, int b) const {
    CL acc{0.0L, 0.0L};
    for (int ix = 0; ix < 5; ++ix) {
      if (kStencil[a][ix] == 0.0L) continue;
      CL row{0.0L, 0.0L};
      for (int iy = 0; iy < 5; ++iy) {
        if (kStencil[b][iy] == 0.0L) continue;
        row += kStencil[b][iy] * f[ix][iy];
      }
      acc += kStencil[a][ix] * row;
    }
    long double scale = std::pow(h, static_cast<long double>(a + b));
    return acc / scale;
  }
};

// (d/dxi)^m (-d/dxi*)^n expanded over Cartesian derivatives:
// d/dxi = (dx - i dy)/2, d/dxi* = (dx + i dy)/2.
CL wirtinger_at(const ChiFnL& chi, int m, int n, long double h) {
  Lattice lat(chi, h);
  std::array<std::array<CL, 5>, 5> cart{};
  std::array<std::array<bool, 5>, 5> have{};
  CL acc{0.0L, 0.0L};
  for (int j = 0; j <= m; ++j) {
    for (int k = 0; k <= n; ++k) {
      int a = j + k;
      int b = (m - j) + (n - k);
      if (!have[a][b]) {
        cart[a][b] = lat.deriv(a, b);
        have[a][b] = true;
      }
      CL coef = binom(m, j) * i_pow(-(m - j)) * binom(n, k) * i_pow(n - k);
      acc += coef * cart[a][b];
    }
  }
  long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
  return acc * sign / std::pow(2.0L, static_cast<long double>(m + n));
}

void check_order(int m, int n) {
  if (m < 0 || n < 0 || m + n > 4)
    throw std::invalid_argument("unsupported order: need m, n >= 0 and m + n <= 4");
}

ChiFnL widen(const ChiFn& chi) {
  return [chi](long double x, long double y) {
    Complex v = chi(Complex(static_cast<double>(x), static_cast<double>(y)));
    return CL(v.real(), v.imag());
  };
}

// Truncation wants a small step, round-off a large one; the crossover
// scales with the dominant curvature of |chi| at the origin. Probed along
// eight rays since chi is a black box here.
double auto_step(const ChiFnL& chi, int order) {
  if (order <= 2) return 1e-3;
  const long double t = 0.25L;
  long double lam = 0.0L;
  for (int k = 0; k < 8; ++k) {
    long double th = static_cast<long double>(k) * 0.25L * static_cast<long double>(M_PI);
    CL v = chi(t * std::cos(th), t * std::sin(th));
    long double mag = std::abs(v);
    if (mag < 1e-300L) mag = 1e-300L;
    long double kappa = -std::log(mag) / (t * t);
    if (kappa > lam) lam = kappa;
  }
  double lam_d = static_cast<double>(lam);
  if (lam_d < 0.05) lam_d = 0.05;
  double h = 5.3e-3 / std::sqrt(lam_d);
  if (h < 2e-3) h = 2e-3;
  if (h > 0.05) h = 0.05;
  return h;
}

Complex fd_impl(const ChiFnL& chi, int m, int n, double step) {
  check_order(m, n);
  if (!(step >= 1e-5 && step <= 1e-1))
    throw std::domain_error("step out of range [1e-5, 1e-1]");
  long double h = static_cast<long double>(step);
  CL coarse = wirtinger_at(chi, m, n, h);
  CL fine = wirtinger_at(chi, m, n, h * 0.5L);
  CL rich = (4.0L * fine - coarse) / 3.0L;
  return Complex(static_cast<double>(rich.real()), static_cast<double>(rich.imag()));
}

}  // namespace

double mean_number_B(const StateParams& params, OrderingParam p) {
  double r = params.squeeze.r;
  double sh = std::sinh(r);
  return params.thermal.n_bar * std::cosh(2.0 * r) + sh * sh + norm2(params.alpha) +
         0.5 * (1.0 - p.p);
}

double variance_combination_B(const StateParams& params, OrderingParam p) {
  double r = params.squeeze.r;
  double nb = params.thermal.n_bar;
  double c4 = std::cosh(4.0 * r);
  double s2 = std::sinh(2.0 * r);
  double tp2 = norm2(t_plus(params));
  double q = 1.0 - p.p;
  return nb * nb * c4 + nb * (c4 + 2.0 * tp2) + 0.5 * s2 * s2 + tp2 + 0.25 * q * q +
         q * ((nb + 0.5) * std::cosh(2.0 * r) + norm2(params.alpha));
}

double mean_number_a(const StateParams& params, OrderingParam p) {
  double r = params.squeeze.r;
  double sh = std::sinh(r);
  return params.thermal.n_bar * std::cosh(2.0 * r) + sh * sh + norm2(t_minus(params)) +
         0.5 * (1.0 - p.p);
}

double variance_combination_a(const StateParams& params, OrderingParam p) {
  double r = params.squeeze.r;
  double nb = params.thermal.n_bar;
  double c4 = std::cosh(4.0 * r);
  double s2 = std::sinh(2.0 * r);
  double td2 = norm2(t_double(params));
  double q = 1.0 - p.p;
  return nb * nb * c4 + nb * (c4 + 2.0 * td2) + 0.5 * s2 * s2 + td2 + 0.25 * q * q +
         q * ((nb + 0.5) * std::cosh(2.0 * r) + norm2(t_minus(params)));
}

double variance_p1(const StateParams& params, Basis basis) {
  OrderingParam one(1.0);
  return basis == Basis::B ? variance_combination_B(params, one)
                           : variance_combination_a(params, one);
}

MomentReport closed_report(const StateParams& params, OrderingParam p, Basis basis) {
  MomentReport rep;
  rep.method = "closed";
  if (basis == Basis::B) {
    rep.mean = mean_number_B(params, p);
    rep.second_combination = variance_combination_B(params, p);
  } else {
    rep.mean = mean_number_a(params, p);
    rep.second_combination = variance_combination_a(params, p);
  }
  if (p.p == 1.0) rep.variance_p1 = rep.second_combination;
  return rep;
}

Complex moment_fd(const ChiFn& chi, int m, int n, OrderingParam p, double step) {
  (void)p;  // chi is already at ordering p; kept for signature symmetry
  return fd_impl(widen(chi), m, n, step);
}

Complex moment_fd(const ChiFnL& chi, int m, int n, OrderingParam p, double step) {
  (void)p;
  return fd_impl(chi, m, n, step);
}

Complex moment_fd(const ChiFn& chi, int m, int n, OrderingParam p) {
  (void)p;
  check_order(m, n);
  ChiFnL wide = widen(chi);
  return fd_impl(wide, m, n, auto_step(wide, m + n));
}

Complex moment_fd(const ChiFnL& chi, int m, int n, OrderingParam p) {
  (void)p;
  check_order(m, n);
  return fd_impl(chi, m, n, auto_step(chi, m + n));
}

Complex moment_quadrature(const QuasiProbGrid& w_grid, int m, int n) {
  check_order(m, n);
  double residual = w_grid.normalization_residual();
  if (!(std::abs(residual) <= 1e-4))
    throw GridResolutionError("grid under-resolved or under-extended");
  const PhaseSpaceGrid& g = w_grid.grid;
  double area = w_grid.cell_area();
  double sum_re = 0.0, comp_re = 0.0;
  double sum_im = 0.0, comp_im = 0.0;
  for (int j = 0; j < g.n_im; ++j) {
    for (int i = 0; i < g.n_re; ++i) {
      Complex eta = g.point(i, j);
      Complex term = w_grid.value(i, j);
      for (int k = 0; k < m; ++k) term *= std::conj(eta);
      for (int k = 0; k < n; ++k) term *= eta;
      term *= area;
      double y_re = term.real() - comp_re;
      double t_re = sum_re + y_re;
      comp_re = (t_re - sum_re) - y_re;
      sum_re = t_re;
      double y_im = term.imag() - comp_im;
      double t_im = sum_im + y_im;
      comp_im = (t_im - sum_im) - y_im;
      sum_im = t_im;
    }
  }
  return Complex(sum_re, sum_im);
}

}  // namespace qphase
