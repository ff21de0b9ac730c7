#pragma once

#include <optional>
#include <string>

#include "qphase/quasiprob.hpp"

namespace qphase {

struct MomentReport {
  double mean = 0.0;                // <N>_p
  double second_combination = 0.0;  // <N^2-combination>_p, equals Dn^2 at p = 1
  std::optional<double> variance_p1;
  std::string method;  // closed | finite_difference | quadrature | oracle
};

// Mean quasi-mode occupation under the thermal state of the physical mode:
// nbar cosh 2r + sinh^2 r + |alpha|^2 + (1 - p)/2.
double mean_number_B(const StateParams& params, OrderingParam p);

// The matching second-moment combination; at p = 1 it is the number variance.
double variance_combination_B(const StateParams& params, OrderingParam p);

// Physical-mode statistics under the thermal state of the quasi-mode.
// Identical to the B forms evaluated at transform_params(params).
double mean_number_a(const StateParams& params, OrderingParam p);
double variance_combination_a(const StateParams& params, OrderingParam p);

// p = 1 specialization: <N^2> - <N>^2 of the relevant number operator.
double variance_p1(const StateParams& params, Basis basis);

MomentReport closed_report(const StateParams& params, OrderingParam p, Basis basis);

// (d/dxi)^m (-d/dxi*)^n chi at xi = 0 by central-difference Wirtinger
// stencils with one Richardson level. m + n <= 4; step in [1e-5, 1e-1].
// The extended-precision overload is required for total order > 2, where
// double-precision chi values put the round-off floor above 1e-6 relative.
Complex moment_fd(const ChiFn& chi, int m, int n, OrderingParam p, double step);
Complex moment_fd(const ChiFnL& chi, int m, int n, OrderingParam p, double step);

// Step chosen automatically: 1e-3 for total order <= 2 (round-off is not
// binding there); for higher orders the step balances truncation against
// round-off using a curvature probe of |chi|.
Complex moment_fd(const ChiFn& chi, int m, int n, OrderingParam p);
Complex moment_fd(const ChiFnL& chi, int m, int n, OrderingParam p);

// Sum W(eta) eta*^m eta^n over cells times the cell area. Requires the
// grid mass to be within 1e-4 of unity. m + n <= 4.
Complex moment_quadrature(const QuasiProbGrid& w_grid, int m, int n);

}  // namespace qphase
