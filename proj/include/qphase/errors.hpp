#pragma once

#include <stdexcept>
#include <string>

namespace qphase {

// Requested quasi-distribution is not a normalizable Gaussian at this
// ordering (the singular regime of the normally ordered distribution).
class SingularDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sampling grid does not cover the support of the function it samples.
class GridSupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A grid is too coarse or too short for the requested quadrature.
class GridResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fock-space cutoff too small for the requested parameters. Carries a
// usable suggestion when one exists (0 otherwise).
class CutoffError : public std::runtime_error {
 public:
  CutoffError(const std::string& msg, int suggested)
      : std::runtime_error(msg), suggested_cutoff(suggested) {}
  int suggested_cutoff;
};

// Parameters need a cutoff beyond the hard cap.
class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal numerical consistency check failed (imaginary residue too
// large, operator identity violated, ...). Indicates a bug or a pathology,
// not a user error.
class NumericalHealthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qphase
