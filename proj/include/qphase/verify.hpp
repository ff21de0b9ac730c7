#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qphase {

struct VerifyOptions {
  int draws = 20;
  int xi_per_draw = 10;
  std::uint64_t seed = 12345;
  bool quick = false;        // reduced sweep: 5 draws, 4 xi each
  bool flip_c_sign = false;  // mutation hook: corrupt the closed-form cross
                             // term inside the Fourier check; the suite must
                             // then fail, proving the check has teeth
};

// worst/tol are in the check's own units. Checks that combine several
// tolerances report worst as the largest deviation-to-tolerance ratio
// with tol = 1 and say so in note.
struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tol = 0.0;
  int cases = 0;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool pass = false;
};

VerifyReport run_suite(const VerifyOptions& options);

// Deterministic plain-text rendering: one line per check, LF endings.
// Byte-identical for identical options on repeated runs.
std::string render_summary(const VerifyReport& report, const VerifyOptions& options);

}  // namespace qphase
