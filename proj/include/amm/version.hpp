#pragma once

namespace amm {

inline constexpr const char* kVersion = "0.1.0";

// Default seed for every tool and test that does not ask for one.
inline constexpr unsigned long long kDefaultSeed = 271828;

}  // namespace amm
