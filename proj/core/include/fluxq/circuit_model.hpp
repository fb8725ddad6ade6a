#ifndef FLUXQ_CIRCUIT_MODEL_HPP
#define FLUXQ_CIRCUIT_MODEL_HPP

#include <Eigen/Dense>

#include "fluxq/device.hpp"

namespace fluxq {

/// Qubit Hamiltonian in the Cooper-pair number basis, n in [-cutoff_n, +cutoff_n].
/// Entries are in GHz (energy/h). The matrix is Hermitian by construction:
/// diagonal 1/2 E_C n^2, first off-diagonals -E_J, second off-diagonals
/// -(alpha E_J / 2) exp(+i 2 pi phi_t) on the upper side.
///
/// Phase convention: with e^{i phi}|n> = |n+1>, this matrix quantizes
/// H = 1/2 E_C n^2 - E_J [2 cos(phi) + alpha cos(2 pi phi_t + 2 phi)],
/// whose potential equals the tilt-flux potential below after phi -> -phi;
/// the spectrum is identical.
struct ChargeBasisOperator {
    int cutoff_n = 0;
    Eigen::MatrixXcd entries;

    int dim() const { return 2 * cutoff_n + 1; }
};

/// Tunable junction ratio alpha(Phi_B) = alpha_max * cos(pi * phi_b).
/// Negative values are passed through unchanged.
double alpha_of_flux(double phi_b, double alpha_max);

/// Double/single-well potential in GHz:
///   U(phi) = -2 E_J cos(phi) - alpha(phi_b) E_J cos(2 pi phi_t - 2 phi)
double potential(double phase, const FluxBias& bias, const DeviceParams& params);

/// Minimum of U(phi) over a fine grid on [-pi, pi).
double potential_minimum(const FluxBias& bias, const DeviceParams& params,
                         int grid_points = 4096);

/// Charge-basis Hamiltonian at the given bias. Requires cutoff_n >= 2,
/// otherwise the second-neighbor (alpha) coupling would vanish entirely.
ChargeBasisOperator build_hamiltonian(const DeviceParams& params, const FluxBias& bias,
                                      int cutoff_n);

/// max|H - H^dagger| / max|H|; zero for an exactly Hermitian matrix.
double hermiticity_defect(const Eigen::MatrixXcd& m);

}  // namespace fluxq

#endif
