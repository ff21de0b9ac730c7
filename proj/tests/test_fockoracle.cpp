#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <random>

#include "qphase/charfn.hpp"
#include "qphase/errors.hpp"
#include "qphase/fockoracle.hpp"
#include "qphase/moments.hpp"

using namespace qphase;
using Eigen::MatrixXcd;

namespace {
constexpr double kPi = 3.14159265358979323846;

double unitary_defect(const MatrixXcd& u) {
  MatrixXcd d = u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("ladder matrix pattern and adjoint") {
  StateParams vac;
  FockOperators ops = build_operators(vac, 32);
  CHECK(ops.cutoff == 32);
  for (int m = 1; m < 32; ++m)
    CHECK(ops.a_mat(m - 1, m).real() == doctest::Approx(std::sqrt(double(m))).epsilon(1e-15));
  CHECK(ops.a_mat.cwiseAbs().sum() ==
        doctest::Approx(ops.a_mat.diagonal(1).cwiseAbs().sum()).epsilon(1e-15));
  CHECK((ops.adag_mat - ops.a_mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  // vacuum: no displacement, no squeeze
  CHECK(unitary_defect(ops.d_mat) <= 1e-12);
  CHECK((ops.b_mat - ops.a_mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trivial reductions of the quasi-mode ladder") {
  StateParams disp(Complex(1.0, 0.0), SqueezeParam(0.0, 0.0), ThermalParam(0.0));
  FockOperators ops = build_operators(disp, 48);
  MatrixXcd want = ops.a_mat - MatrixXcd::Identity(48, 48);
  CHECK((ops.b_mat - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(ops.b_mat(0, 0) == Complex(-1.0, 0.0));
}

TEST_CASE("displacement and squeeze exponentials are unitary") {
  StateParams s(Complex(0.7, -0.4), SqueezeParam(0.8, 1.1), ThermalParam(0.2));
  FockOperators ops = build_operators(s, 128);
  CHECK(unitary_defect(ops.d_mat) <= 1e-10);
  CHECK(unitary_defect(ops.s_mat) <= 1e-10);
  CHECK(ops.dual_residual <= 1e-8);
  CHECK(commutator_deviation(ops) <= 1e-8);
}

TEST_CASE("matrix exponential validates and is deterministic") {
  int n = 24;
  MatrixXcd g = MatrixXcd::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) {
    g(m + 1, m) = Complex(0.3, 0.1) * std::sqrt(double(m + 1));
    g(m, m + 1) = -std::conj(g(m + 1, m));
  }
  MatrixXcd e1 = expm_antihermitian(g);
  MatrixXcd e2 = expm_antihermitian(g);
  CHECK((e1 - e2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(unitary_defect(e1) <= 1e-12);
  CHECK_THROWS_AS(expm_antihermitian(MatrixXcd::Identity(8, 8)), NumericalHealthError);
}

TEST_CASE("safe block excludes the truncation-polluted top") {
  CHECK(safe_block(100) == 80);
  CHECK(safe_block(32) == 22);
  CHECK(safe_block(16) == 6);
}

TEST_CASE("dual construction of the ladder at the documented point") {
  StateParams s(Complex(0, 0), SqueezeParam(0.5, kPi / 2.0), ThermalParam(0.0));
  CHECK(dual_construction_residual(s, 64) <= 1e-8);
}

TEST_CASE("thermal state construction") {
  DensityMatrix rho = rho_a(1.0, 60);
  CHECK(rho.basis_label == "a-thermal");
  CHECK(std::abs(rho.rho.trace().real() - 1.0) <= 1e-14);
  // geometric diagonal, ratio q = nbar/(nbar+1)
  for (int k = 0; k + 1 < 20; ++k)
    CHECK(rho.rho(k + 1, k + 1).real() / rho.rho(k, k).real() ==
          doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rho.rho.cwiseAbs().sum() ==
        doctest::Approx(rho.rho.diagonal().cwiseAbs().sum()).epsilon(1e-15));

  CHECK_THROWS_AS(rho_a(-0.1, 32), std::domain_error);
  try {
    rho_a(1.0, 20);  // geometric tail at 20 is ~1e-6: too fat
    CHECK(false);
  } catch (const CutoffError& e) {
    CHECK(e.suggested_cutoff >= 40);
    CHECK(std::string(e.what()).find("cutoff too small") != std::string::npos);
  }
}

TEST_CASE("transformed thermal state: invariants and occupation") {
  StateParams s(Complex(0.4, 0.3), SqueezeParam(0.7, kPi / 4.0), ThermalParam(0.5));
  DensityMatrix rho = rho_b(s, 96);
  CHECK(rho.basis_label == "B-thermal");
  CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(rho.rho.trace().real() - 1.0) <= 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  double occ = 0.0;
  for (int k = 0; k < 96; ++k) occ += k * rho.rho(k, k).real();
  CHECK(std::abs(occ - mean_number_a(s, 1.0)) <= 1e-6);

  // no squeeze, no displacement: reduces to the thermal state
  StateParams th(Complex(0, 0), SqueezeParam(0.0, 0.0), ThermalParam(0.7));
  DensityMatrix rb = rho_b(th, 64);
  DensityMatrix ra = rho_a(0.7, 64);
  CHECK(rb.basis_label == "B-thermal");
  CHECK((rb.rho - ra.rho).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("zero-temperature image state is pure") {
  StateParams s(Complex(0.5, 0.0), SqueezeParam(0.6, 0.9), ThermalParam(0.0));
  DensityMatrix rho = rho_b(s, 64);
  double purity = (rho.rho * rho.rho).trace().real();
  CHECK(std::abs(purity - 1.0) <= 1e-8);
}

TEST_CASE("oracle characteristic value: identity at the origin") {
  StateParams s(Complex(0.2, 0.1), SqueezeParam(0.3, 0.4), ThermalParam(0.6));
  FockOperators ops = build_operators(s, 64);
  DensityMatrix rho = rho_a(0.6, 64);
  OracleValue v = oracle_chi(rho, ops.b_mat, ops.bdag_mat, Complex(0, 0), 0.0);
  CHECK(std::abs(v.value - Complex(1.0, 0.0)) <= 1e-12);
  CHECK(v.trusted);
}

TEST_CASE("oracle reproduces the thermal characteristic function") {
  StateParams th(Complex(0, 0), SqueezeParam(0.0, 0.0), ThermalParam(1.0));
  FockOperators ops = build_operators(th, 60);
  DensityMatrix rho = rho_a(1.0, 60);
  std::mt19937_64 eng(67);
  for (int k = 0; k < 8; ++k) {
    double mag = 2.0 * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    double ang = 2.0 * kPi * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    Complex xi = std::polar(mag, ang);
    for (double p : {1.0, 0.0, -1.0}) {
      OracleValue v = oracle_chi(rho, ops.a_mat, ops.adag_mat, xi, p);
      CHECK(v.trusted);
      CHECK(std::abs(v.value - chi_thermal(xi, 1.0, p)) <= 1e-8);
    }
  }
}

TEST_CASE("oracle reproduces both closed-form characteristic functions") {
  StateParams s(Complex(0.3, -0.2), SqueezeParam(0.6, kPi / 3.0), ThermalParam(0.5));
  Complex xi(0.5, 0.5);

  FockOperators ops = build_operators(s, 80);
  DensityMatrix rho_th = rho_a(0.5, 80);
  OracleValue va = oracle_chi(rho_th, ops.b_mat, ops.bdag_mat, xi, 0.0);
  CHECK(va.trusted);
  CHECK(std::abs(va.value - chi_a(xi, s, 0.0)) <= 1e-8);
  CHECK(va.value.real() == doctest::Approx(0.6822930071184127).epsilon(1e-8));
  CHECK(va.value.imag() == doctest::Approx(-0.3727383685917959).epsilon(1e-8));

  FockOperators ops2 = build_operators(s, 120);
  DensityMatrix rho_img = rho_b(s, 120);
  OracleValue vb = oracle_chi(rho_img, ops2.a_mat, ops2.adag_mat, xi, 0.0);
  CHECK(vb.trusted);
  CHECK(std::abs(vb.value - chi_b(xi, s, 0.0)) <= 1e-8);
}

TEST_CASE("oracle flags rather than throws outside its trusted window") {
  StateParams vac;
  FockOperators ops = build_operators(vac, 16);
  DensityMatrix rho = rho_a(0.0, 16);
  OracleValue v = oracle_chi(rho, ops.a_mat, ops.adag_mat, Complex(2.0, 0.0), 0.0);
  CHECK_FALSE(v.trusted);
  CHECK(std::isfinite(v.value.real()));
}

TEST_CASE("oracle moments of the thermal state") {
  StateParams th(Complex(0, 0), SqueezeParam(0.0, 0.0), ThermalParam(1.0));
  FockOperators ops = build_operators(th, 60);
  DensityMatrix rho = rho_a(1.0, 60);
  MatrixXcd numop = ops.adag_mat * ops.a_mat;
  CHECK(std::abs(oracle_moment(rho, numop, 1) - 1.0) <= 1e-9);
  CHECK(std::abs(oracle_moment(rho, numop, 2) - 3.0) <= 1e-8);  // 2 nbar^2 + nbar
  CHECK_THROWS_AS(oracle_moment(rho, numop, 3), std::invalid_argument);
  MatrixXcd small = MatrixXcd::Zero(8, 8);
  CHECK_THROWS_AS(oracle_moment(rho, small, 1), std::invalid_argument);
  CHECK_THROWS_AS(oracle_chi(rho, small, small, Complex(0.1, 0), 0.0), std::invalid_argument);
}

TEST_CASE("adaptive cutoff: pins, monotonicity, range") {
  StateParams vac;
  CHECK(adaptive_cutoff(vac, 1e-12) == 16);
  StateParams th(Complex(0, 0), SqueezeParam(0.0, 0.0), ThermalParam(1.0));
  CHECK(adaptive_cutoff(th, 1e-12) == 48);

  StateParams hot(Complex(1.0, 0.0), SqueezeParam(1.0, 0.0), ThermalParam(1.0));
  int n_hot = adaptive_cutoff(hot, 1e-12);
  CHECK(n_hot == 384);
  CHECK(adaptive_cutoff(hot, 1e-8) <= n_hot);
  CHECK(adaptive_cutoff(hot, 1e-6) <= adaptive_cutoff(hot, 1e-8));

  CHECK_THROWS_AS(adaptive_cutoff(vac, 1e-15), std::domain_error);
  CHECK_THROWS_AS(adaptive_cutoff(vac, 1e-5), std::domain_error);

  StateParams toast(Complex(1.0, 0.0), SqueezeParam(2.0, 0.0), ThermalParam(1.0));
  CHECK_THROWS_AS(adaptive_cutoff(toast, 1e-12), OracleCapError);
}

TEST_CASE("operator construction rejects an insufficient cutoff") {
  CHECK_THROWS_AS(build_operators(StateParams(), 8), std::invalid_argument);
  StateParams s(Complex(0.5, 0.0), SqueezeParam(0.8, 0.0), ThermalParam(1.0));
  try {
    build_operators(s, 16);
    CHECK(false);
  } catch (const CutoffError& e) {
    CHECK(e.suggested_cutoff > 16);
    FockOperators ops = build_operators(s, e.suggested_cutoff);  // suggestion is usable
    CHECK(ops.cutoff == e.suggested_cutoff);
    CHECK(commutator_deviation(ops) <= 1e-8);
  }
}

TEST_CASE("hard cap override through the environment") {
  char* old = std::getenv("QPHASE_MAX_CUTOFF");
  std::string saved = old != nullptr ? old : "";
  setenv("QPHASE_MAX_CUTOFF", "2048", 1);
  CHECK(max_oracle_cutoff() == 2048);
  setenv("QPHASE_MAX_CUTOFF", "not-a-number", 1);
  CHECK(max_oracle_cutoff() == 1024);  // invalid values fall back to the default
  if (old != nullptr)
    setenv("QPHASE_MAX_CUTOFF", saved.c_str(), 1);
  else
    unsetenv("QPHASE_MAX_CUTOFF");
}
