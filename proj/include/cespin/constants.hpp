#pragma once

// Unit system used throughout: lengths in nm, magnetic fields in mT,
// frequencies in MHz (linear, not angular), times in us.
// Time evolution is U = exp(-i 2*pi H t) with H in MHz and t in us.

namespace cespin::constants {

// Bohr magneton over Planck constant, MHz per mT (CODATA 13.996245 GHz/T).
inline constexpr double mu_B_over_h = 13.9962;

// Nuclear magneton over Planck constant, MHz per mT (CODATA 7.6225932 MHz/T).
inline constexpr double mu_N_over_h = 7.62259e-3;

// Point-dipole coupling prefactor K in  nu[MHz] = K * gbar1 * gbar2 / r^3
// with gbar in MHz/mT and r in nm:  K = (mu0/4pi) * h * 1e33  (unit collapse
// of T.m/A * J.s * (MHz/mT)^2 / nm^3 into MHz).  Numerically equal to the
// Planck constant mantissa by coincidence of the chosen powers of ten.
inline constexpr double dipolar_prefactor = 0.0662607015; // MHz nm^3 (MHz/mT)^-2

// Free-electron g-factor, for reference output only.
inline constexpr double g_electron = 2.00231930436;

} // namespace cespin::constants
