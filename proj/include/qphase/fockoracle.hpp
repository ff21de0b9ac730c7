#pragma once

#include <Eigen/Dense>
#include <string>

#include "qphase/core.hpp"

namespace qphase {

// Truncated number-basis matrices for one set of state parameters.
// b_mat is the closed linear combination cosh r a + e^{i phi} sinh r a^dag
// - alpha; dual_residual records how far a sandwich construction
// S D a D^dag S^dag on an inflated basis deviates from it (probe block
// min(cutoff, 64)).
struct FockOperators {
  int cutoff = 0;
  StateParams params{};
  Eigen::MatrixXcd a_mat, adag_mat, d_mat, s_mat, b_mat, bdag_mat;
  double dual_residual = 0.0;
};

struct DensityMatrix {
  Eigen::MatrixXcd rho;
  std::string basis_label;  // "a-thermal" | "B-thermal"
};

// Trace evaluation result. trusted is an occupancy heuristic: the displaced
// state's support must fit the cutoff with margin, else the value carries
// truncation error and is flagged rather than thrown.
struct OracleValue {
  Complex value;
  bool trusted = true;
};

// Basis states above this index are excluded from operator-identity checks;
// truncation artifacts concentrate at the corner.
int safe_block(int cutoff);

// Hard ceiling for adaptive_cutoff, QPHASE_MAX_CUTOFF overrides the 1024
// default.
int max_oracle_cutoff();

// exp(G) for anti-Hermitian G via eigendecomposition of -iG (deterministic;
// exactly unitary up to round-off). Tridiagonal and even/odd-chain
// generators take a real-tridiagonal fast path.
Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& g);

FockOperators build_operators(const StateParams& params, int cutoff);

// Thermal state of the number basis: diagonal (1-q) q^n, q = n_bar/(n_bar+1),
// renormalized over the truncated basis. Tail mass q^cutoff must be < 1e-12.
DensityMatrix rho_a(double n_bar, int cutoff);

// S(zeta) D(alpha) rho_thermal D^dag S^dag, built column-by-column on an
// inflated internal basis and truncated back to cutoff.
DensityMatrix rho_b(const StateParams& params, int cutoff);

// Tr[rho expm(xi opdag - xi* op)] e^{p |xi|^2 / 2}.
OracleValue oracle_chi(const DensityMatrix& rho, const Eigen::MatrixXcd& op,
                       const Eigen::MatrixXcd& opdag, ComplexAmplitude xi,
                       OrderingParam p);

// Tr[rho number_op^power], power 1 or 2; imaginary residue above 1e-10 is a
// numerical-health failure.
double oracle_moment(const DensityMatrix& rho, const Eigen::MatrixXcd& number_op,
                     int power);

// Smallest ladder cutoff (16, 24, 32, 48, ... doubling) at which the
// trailing diagonal mass of both the thermal state and its displaced-squeezed
// image stays below tol. tol in [1e-14, 1e-6].
int adaptive_cutoff(const StateParams& params, double tol);

// max |([b, b^dag] - 1)_{ij}| over the safe block.
double commutator_deviation(const FockOperators& ops);

// Standalone dual-construction probe: closed Bogoliubov form vs the
// sandwiched product on a block x block window, evaluated on an inflated
// basis sized to keep truncation out of the window.
double dual_construction_residual(const StateParams& params, int block);

}  // namespace qphase
