#ifndef FLUXQ_CONSTANTS_HPP
#define FLUXQ_CONSTANTS_HPP

namespace fluxq::constants {

// CODATA 2018 exact values (SI redefinition).
inline constexpr double h = 6.62607015e-34;        // Planck constant, J s
inline constexpr double hbar = h / 6.283185307179586476925286766559;  // J s
inline constexpr double e = 1.602176634e-19;       // elementary charge, C
inline constexpr double k_b = 1.380649e-23;        // Boltzmann constant, J/K
inline constexpr double phi_0 = h / (2.0 * e);     // flux quantum, Wb

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace fluxq::constants

#endif
