#pragma once

namespace covkit::phys {

// CODATA exact values (SI)
inline constexpr double h = 6.62607015e-34;    // J s
inline constexpr double k_B = 1.380649e-23;    // J/K
inline constexpr double e = 1.602176634e-19;   // C

}  // namespace covkit::phys

namespace covkit::tol {

inline constexpr double psd = 1e-9;       // classical positivity slack
inline constexpr double quantum = 0.03;   // nu >= 1 slack for two-decimal published data
inline constexpr double sym_input = 1e-6; // max accepted asymmetry of raw input
inline constexpr double pairing = 1e-9;   // +/- i*nu pairing residual

}  // namespace covkit::tol
