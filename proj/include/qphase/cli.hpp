#pragma once

#include <cstdint>
#include <string>

#include "qphase/core.hpp"
#include "qphase/quasiprob.hpp"

namespace qphase {

// One resolved invocation: command-line flags merged over an optional JSON
// config file (flags win). Everything downstream re-validates through the
// module constructors, so a config file cannot smuggle in bad state.
struct RunConfig {
  StateParams params;
  double p = 0.0;
  Basis basis = Basis::B;
  double extent = 0.0;   // half-extent override; 0 = module default
  int samples = 0;       // grid points per axis / slice samples; 0 = default
  double phi_dir = 0.0;  // chi-slice ray direction
  std::string out;       // empty = stdout
  std::string format = "csv";
  bool cross_verify = false;
  std::uint64_t seed = 12345;
  bool quick = false;
  bool flip_c_sign = false;
  std::string command;
};

// Exit codes: 0 ok, 1 verification failure, 2 validity/domain error,
// 3 I/O failure, 4 oracle cutoff cap exceeded.
int run_cli(int argc, char** argv);

}  // namespace qphase
