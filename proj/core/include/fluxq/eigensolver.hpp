#ifndef FLUXQ_EIGENSOLVER_HPP
#define FLUXQ_EIGENSOLVER_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/circuit_model.hpp"
#include "fluxq/device.hpp"

namespace fluxq {

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    double f01_rel_tol = 1e-8;
    int initial_cutoff = 15;
    int max_cutoff = 200;
    int n_levels = 5;

    void validate() const;
};

/// f01 changes this small cannot be resolved in double precision against the
/// ~1e4 GHz matrix norms (roundoff ~1e-12 GHz per level); splittings below it
/// carry the resolution flag. Kept far under any physical tolerance so the
/// floor never masks genuine truncation error at ordinary bias points.
inline constexpr double f01_resolution_floor_ghz = 1e-9;

struct SpectrumResult {
    std::vector<double> levels;          // ascending, GHz
    std::vector<Eigen::VectorXcd> states;  // unit norm, deterministic phase
    int cutoff_used = 0;
    bool converged = false;
    bool below_resolution = false;       // f01 under the numerical floor
    double residual = 0.0;               // relative f01 change at last doubling

    double f01() const { return levels.at(1) - levels.at(0); }
};

/// Lowest n_levels eigenpairs of one charge-basis matrix, no convergence loop.
/// Eigenvector phases are fixed by rotating the largest-magnitude component
/// to the positive real axis. with_states = false skips the eigenvector
/// backtransform, roughly tripling throughput for frequency-only work.
SpectrumResult eigensolve(const ChargeBasisOperator& h, int n_levels,
                          bool with_states = true);

/// f01 with automatic cutoff doubling until the relative f01 change per
/// doubling drops below opts.f01_rel_tol. Throws SolveError when max_cutoff
/// is reached without convergence.
SpectrumResult solve_qubit(const DeviceParams& params, const FluxBias& bias,
                           const SolveOptions& opts = {}, bool with_states = true);

/// Convenience wrapper returning just f01 in GHz.
double qubit_frequency(const DeviceParams& params, const FluxBias& bias,
                       const SolveOptions& opts = {});

/// |<1| n |0>| from a converged spectrum. The state vectors must come from a
/// charge-basis solve of dimension 2*cutoff+1.
double charge_matrix_element(const SpectrumResult& spectrum);
double charge_matrix_element(const DeviceParams& params, const FluxBias& bias,
                             const SolveOptions& opts = {});

/// psi(phi) = sum_n c_n e^{i n phi} / sqrt(2 pi) on the given grid.
std::vector<std::complex<double>> wavefunction_phase_basis(
    const Eigen::VectorXcd& state, const std::vector<double>& phase_grid);

}  // namespace fluxq

#endif
