#pragma once

namespace qphase {

inline constexpr const char* kVersion = "0.1.0";

}
