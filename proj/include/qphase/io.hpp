#pragma once

#include <string>

#include "qphase/quasiprob.hpp"

namespace qphase {

// Fixed 17 significant digits: lossless double round-trip, byte-stable
// across runs (shortest-form printing is also stable but digit count
// then varies by value, which complicates downstream column parsing).
std::string format_g17(double v);

// header "e1,e2,W", one row per cell, outer loop e2, inner loop e1,
// LF line endings.
std::string grid_csv(const QuasiProbGrid& grid);

// False on any stream failure; content written byte for byte (binary mode).
bool write_text_file(const std::string& path, const std::string& content);

}  // namespace qphase
