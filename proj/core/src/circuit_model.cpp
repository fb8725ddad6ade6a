#include "fluxq/circuit_model.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fluxq/constants.hpp"

namespace fluxq {

using constants::pi;
using constants::two_pi;

double alpha_of_flux(double phi_b, double alpha_max) {
    return alpha_max * std::cos(pi * phi_b);
}

double potential(double phase, const FluxBias& bias, const DeviceParams& params) {
    const double a = alpha_of_flux(bias.phi_b, params.alpha_max);
    return -2.0 * params.ej_ghz * std::cos(phase) -
           a * params.ej_ghz * std::cos(two_pi * bias.phi_t - 2.0 * phase);
}

double potential_minimum(const FluxBias& bias, const DeviceParams& params, int grid_points) {
    double u_min = potential(-pi, bias, params);
    for (int i = 1; i < grid_points; ++i) {
        const double phi = -pi + two_pi * i / grid_points;
        u_min = std::min(u_min, potential(phi, bias, params));
    }
    return u_min;
}

ChargeBasisOperator build_hamiltonian(const DeviceParams& params, const FluxBias& bias,
                                      int cutoff_n) {
    if (cutoff_n < 2)
        throw std::invalid_argument("build_hamiltonian: cutoff_n must be >= 2");

    const int dim = 2 * cutoff_n + 1;
    const double a = alpha_of_flux(bias.phi_b, params.alpha_max);
    const std::complex<double> second =
        -0.5 * a * params.ej_ghz *
        std::exp(std::complex<double>(0.0, two_pi * bias.phi_t));

    ChargeBasisOperator op;
    op.cutoff_n = cutoff_n;
    op.entries = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - cutoff_n;
        op.entries(i, i) = 0.5 * params.ec_ghz * n * n;
        if (i + 1 < dim) {
            op.entries(i, i + 1) = -params.ej_ghz;
            op.entries(i + 1, i) = -params.ej_ghz;
        }
        if (i + 2 < dim) {
            op.entries(i, i + 2) = second;
            op.entries(i + 2, i) = std::conj(second);
        }
    }
    return op;
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace fluxq
