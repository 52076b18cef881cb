#pragma once

// SI constants used throughout. Single source of truth: every module pulls
// these instead of redefining numeric literals.

namespace spinsnn::constants {

inline constexpr double k_boltzmann = 1.380649e-23;    // [J/K], exact SI
inline constexpr double q_electron = 1.602176634e-19;  // [C], exact SI
inline constexpr double mu_bohr = 9.2740100783e-24;    // [J/T]
inline constexpr double mu0 = 1.25663706212e-6;        // [T*m/A]
inline constexpr double hbar = 1.054571817e-34;        // [J*s]

// Gyromagnetic ratio for fields expressed in A/m: gamma = 2*mu_B*mu0/hbar,
// ~2.2102e5 m/(A*s). The factor mu0 folds the T->A/m conversion into gamma so
// the dynamics below can work with H fields directly.
inline constexpr double gamma_llg = 2.0 * mu_bohr * mu0 / hbar;

// Thermal energy at T [K].
inline constexpr double kT(double temperature_K) {
  return k_boltzmann * temperature_K;
}

inline constexpr double seconds_per_year = 365.25 * 24.0 * 3600.0;

}  // namespace spinsnn::constants
