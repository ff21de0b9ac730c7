#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qphase/charfn.hpp"
#include "qphase/errors.hpp"
#include "qphase/moments.hpp"

using namespace qphase;

namespace {
constexpr double kPi = 3.14159265358979323846;

double u01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

StateParams random_params(std::mt19937_64& eng) {
  double nb = u01(eng);
  double r = u01(eng);
  Complex alpha = std::polar(u01(eng), 2.0 * kPi * u01(eng));
  double phi = 2.0 * kPi * u01(eng);
  return StateParams(alpha, SqueezeParam(r, phi), ThermalParam(nb));
}
}  // namespace

TEST_CASE("closed means: limiting families") {
  // thermal only
  StateParams th(Complex(0, 0), SqueezeParam(0.0, 0.0), ThermalParam(0.8));
  CHECK(mean_number_B(th, 1.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(variance_combination_B(th, 1.0) == doctest::Approx(0.8 * 0.8 + 0.8).epsilon(1e-14));
  // coherent only: Poissonian
  StateParams coh(Complex(0.6, -0.8), SqueezeParam(0.0, 0.0), ThermalParam(0.0));
  CHECK(mean_number_B(coh, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(variance_combination_B(coh, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // squeezed vacuum, physical-mode statistics of the image state
  StateParams sq(Complex(1.0, 0.0), SqueezeParam(1.0, 0.0), ThermalParam(0.0));
  double want = std::sinh(1.0) * std::sinh(1.0) + std::exp(-2.0);
  CHECK(mean_number_a(sq, 1.0) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("closed moments at frozen reference points") {
  StateParams s1(Complex(0.5, 0.0), SqueezeParam(1.0, 0.0), ThermalParam(1.0));
  CHECK(mean_number_B(s1, 1.0) == doctest::Approx(5.393293536625447).epsilon(1e-14));

  StateParams s2(Complex(0.4, 0.3), SqueezeParam(0.7, kPi / 4.0), ThermalParam(0.5));
  CHECK(variance_combination_B(s2, 1.0) == doctest::Approx(9.913035242719765).epsilon(1e-13));
  CHECK(mean_number_a(s2, 1.0) == doctest::Approx(1.7711942851603932).epsilon(1e-13));
  CHECK(variance_combination_a(s2, 1.0) == doctest::Approx(8.537704793383508).epsilon(1e-13));
}

TEST_CASE("ordering shift is exact in closed form") {
  std::mt19937_64 eng(47);
  for (int k = 0; k < 25; ++k) {
    StateParams s = random_params(eng);
    double p = 2.0 * u01(eng) - 1.0;
    double m1 = mean_number_B(s, 1.0);
    double c1 = variance_combination_B(s, 1.0);
    double mp = mean_number_B(s, p);
    double cp = variance_combination_B(s, p);
    CHECK(mp == doctest::Approx(m1 + 0.5 * (1.0 - p)).epsilon(1e-13));
    CHECK(cp == doctest::Approx(c1 + (1.0 - p) * (m1 + 0.5) +
                                0.25 * (1.0 - p) * (1.0 - p)).epsilon(1e-12));
  }
}

TEST_CASE("the two bases are related by the parameter transformation") {
  std::mt19937_64 eng(53);
  for (int k = 0; k < 25; ++k) {
    StateParams s = random_params(eng);
    StateParams t = transform_params(s);
    double p = 2.0 * u01(eng) - 1.0;
    CHECK(mean_number_a(s, p) ==
          doctest::Approx(mean_number_B(t, p)).epsilon(1e-13));
    CHECK(variance_combination_a(s, p) ==
          doctest::Approx(variance_combination_B(t, p)).epsilon(1e-13));
  }
}

TEST_CASE("p = 1 variance is nonnegative and consistent") {
  std::mt19937_64 eng(59);
  for (int k = 0; k < 25; ++k) {
    StateParams s = random_params(eng);
    double vb = variance_p1(s, Basis::B);
    double va = variance_p1(s, Basis::a);
    CHECK(vb >= 0.0);
    CHECK(va >= 0.0);
    CHECK(vb == doctest::Approx(variance_combination_B(s, 1.0)).epsilon(1e-14));
    CHECK(va == doctest::Approx(variance_combination_a(s, 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("closed report carries the p = 1 variance only at p = 1") {
  StateParams s(Complex(0.3, 0.1), SqueezeParam(0.4, 0.2), ThermalParam(0.6));
  MomentReport r1 = closed_report(s, 1.0, Basis::B);
  CHECK(r1.method == "closed");
  CHECK(r1.variance_p1.has_value());
  CHECK(*r1.variance_p1 == doctest::Approx(r1.second_combination).epsilon(1e-15));
  MomentReport r0 = closed_report(s, 0.0, Basis::B);
  CHECK_FALSE(r0.variance_p1.has_value());
  CHECK(r0.mean == doctest::Approx(mean_number_B(s, 0.0)).epsilon(1e-15));
}

TEST_CASE("finite differences: reference derivatives") {
  StateParams s(Complex(0.3, -0.2), SqueezeParam(0.6, kPi / 3.0), ThermalParam(0.5));
  ChiFn chi1 = [&](Complex xi) { return chi_a(xi, s, 1.0); };

  // zeroth derivative is the function value at the origin
  Complex d00 = moment_fd(chi1, 0, 0, 1.0);
  CHECK(std::abs(d00 - Complex(1.0, 0.0)) <= 1e-12);

  // first derivative picks out the displacement
  Complex d10 = moment_fd(chi1, 1, 0, 1.0);
  CHECK(std::abs(d10 - (-std::conj(s.alpha))) <= 1e-8);

  // (1,1) is the mean occupation at p = 1
  Complex d11 = moment_fd(chi1, 1, 1, 1.0);
  double want = mean_number_B(s, 1.0);
  CHECK(std::abs(d11.real() - want) <= 1e-6 * std::max(1.0, want));
  CHECK(std::abs(d11.imag()) <= 1e-8);
}

TEST_CASE("finite differences reach fourth order in extended precision") {
  std::mt19937_64 eng(61);
  for (int k = 0; k < 6; ++k) {
    StateParams s = random_params(eng);
    for (double p : {1.0, 0.0, -1.0}) {
      ChiFnL chi = chi_a_extended(s, p);
      double m11 = moment_fd(chi, 1, 1, p).real();
      double m22 = moment_fd(chi, 2, 2, p).real();
      double mean = mean_number_B(s, p);
      double comb = variance_combination_B(s, p);
      CHECK(std::abs(m11 - mean) <= 1e-6 * std::max(1.0, std::abs(mean)));
      // the second-moment combination from raw derivatives
      double comb_fd = m22 - m11 * m11 + m11;
      CHECK(std::abs(comb_fd - comb) <= 1e-6 * std::max(1.0, std::abs(comb)));
    }
  }
}

TEST_CASE("finite differences validate their inputs") {
  ChiFn chi = [](Complex xi) { return chi_thermal(xi, 0.5, 0.0); };
  CHECK_THROWS_AS(moment_fd(chi, 3, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(moment_fd(chi, -1, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(moment_fd(chi, 1, 1, 0.0, 1e-6), std::domain_error);
  CHECK_THROWS_AS(moment_fd(chi, 1, 1, 0.0, 0.5), std::domain_error);
  // explicit in-range step works
  Complex d = moment_fd(chi, 1, 1, 0.0, 1e-3);
  CHECK(std::abs(d.real() - 1.0) <= 1e-6);  // thermal mean at p = 0 is nbar + 1/2
}

TEST_CASE("quadrature moments on closed-form grids") {
  // vacuum at p = 0: mass 1, mean 1/2
  StateParams vac;
  QuasiProbGrid qp = fill_closed(moment_grid(vac, 0.0, Basis::B), vac, 0.0, Basis::B);
  CHECK(std::abs(moment_quadrature(qp, 0, 0) - Complex(1.0, 0.0)) <= 1e-9);
  CHECK(std::abs(moment_quadrature(qp, 1, 1).real() - 0.5) <= 1e-7);

  // displaced vacuum: first moment sits at the peak, mean gains |alpha|^2
  StateParams coh(Complex(1.0, 0.0), SqueezeParam(0.0, 0.0), ThermalParam(0.0));
  QuasiProbGrid qc = fill_closed(moment_grid(coh, 0.0, Basis::B), coh, 0.0, Basis::B);
  CHECK(std::abs(moment_quadrature(qc, 1, 0) - Complex(-1.0, 0.0)) <= 1e-7);
  CHECK(std::abs(moment_quadrature(qc, 1, 1).real() - 1.5) <= 1e-6);
}

TEST_CASE("quadrature rejects an under-extended grid") {
  StateParams vac;
  PhaseSpaceGrid tiny(Complex(0, 0), 1.0, 1.0, 32, 32);
  QuasiProbGrid qp = fill_closed(tiny, vac, 0.0, Basis::B);
  CHECK_THROWS_AS(moment_quadrature(qp, 1, 1), GridResolutionError);
  CHECK_THROWS_WITH(moment_quadrature(qp, 1, 1),
                    doctest::Contains("under-resolved or under-extended"));
  CHECK_THROWS_AS(moment_quadrature(qp, 5, 0), std::invalid_argument);
}

TEST_CASE("three evaluation paths agree at a generic point") {
  StateParams s(Complex(0.4, 0.3), SqueezeParam(0.7, kPi / 4.0), ThermalParam(0.5));
  double p = 0.0;
  double mean = mean_number_B(s, p);
  double comb = variance_combination_B(s, p);

  ChiFnL chi = chi_a_extended(s, p);
  double f11 = moment_fd(chi, 1, 1, p).real();
  double f22 = moment_fd(chi, 2, 2, p).real();
  CHECK(std::abs(f11 - mean) <= 1e-6 * std::max(1.0, mean));
  CHECK(std::abs((f22 - f11 * f11 + f11) - comb) <= 1e-6 * std::max(1.0, comb));

  QuasiProbGrid qp = fill_closed(moment_grid(s, p, Basis::B), s, p, Basis::B);
  double q11 = moment_quadrature(qp, 1, 1).real();
  double q22 = moment_quadrature(qp, 2, 2).real();
  CHECK(std::abs(q11 - mean) <= 1e-4 * std::max(1.0, mean));
  CHECK(std::abs((q22 - q11 * q11 + q11) - comb) <= 1e-4 * std::max(1.0, comb));
}
