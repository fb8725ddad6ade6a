#include "fluxq/eigensolver.hpp"

#include <algorithm>
#include <cmath>

#include "fluxq/constants.hpp"

namespace fluxq {

void SolveOptions::validate() const {
    if (!(f01_rel_tol > 0.0 && f01_rel_tol < 1.0))
        throw std::invalid_argument("SolveOptions: f01_rel_tol must be in (0,1)");
    if (initial_cutoff < 2)
        throw std::invalid_argument("SolveOptions: initial_cutoff must be >= 2");
    if (max_cutoff < initial_cutoff)
        throw std::invalid_argument("SolveOptions: max_cutoff must be >= initial_cutoff");
    if (n_levels < 2)
        throw std::invalid_argument("SolveOptions: n_levels must be >= 2");
}

namespace {

void fix_phase(Eigen::VectorXcd& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> c = v(imax);
    if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

}  // namespace

SpectrumResult eigensolve(const ChargeBasisOperator& h, int n_levels, bool with_states) {
    const int dim = h.dim();
    if (n_levels > dim)
        throw std::invalid_argument("eigensolve: n_levels exceeds matrix dimension");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        h.entries, with_states ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw SolveError("eigensolve: Hermitian eigen-iteration did not converge");

    SpectrumResult r;
    r.cutoff_used = h.cutoff_n;
    r.levels.resize(n_levels);
    for (int k = 0; k < n_levels; ++k) r.levels[k] = solver.eigenvalues()(k);
    if (with_states) {
        r.states.resize(n_levels);
        for (int k = 0; k < n_levels; ++k) {
            r.states[k] = solver.eigenvectors().col(k);
            fix_phase(r.states[k]);
        }
    }
    return r;
}

SpectrumResult solve_qubit(const DeviceParams& params, const FluxBias& bias,
                           const SolveOptions& opts, bool with_states) {
    opts.validate();

    auto solve_at = [&](int cutoff) {
        const auto h = build_hamiltonian(params, bias, cutoff);
        return eigensolve(h, std::min(opts.n_levels, h.dim()), with_states);
    };

    SpectrumResult prev = solve_at(opts.initial_cutoff);
    int cutoff = opts.initial_cutoff;
    double residual = 1.0;
    while (true) {
        const int next = std::min(2 * cutoff, opts.max_cutoff);
        SpectrumResult cur = solve_at(next);
        const double delta = std::abs(cur.f01() - prev.f01());
        const double denom = std::max(std::abs(cur.f01()), f01_resolution_floor_ghz);
        residual = delta / denom;
        cur.residual = residual;
        // accept when the relative change meets the tolerance, or when the
        // absolute change is below the physical resolution floor (relevant in
        // the deep double-well regime where f01 itself is tiny)
        if (residual < opts.f01_rel_tol || delta < f01_resolution_floor_ghz) {
            cur.converged = true;
            cur.below_resolution = residual >= opts.f01_rel_tol ||
                                   cur.f01() < f01_resolution_floor_ghz;
            return cur;
        }
        if (next >= opts.max_cutoff) {
            throw SolveError("solve_qubit: f01 not converged at max_cutoff " +
                             std::to_string(opts.max_cutoff) + ", last residual " +
                             std::to_string(residual));
        }
        prev = std::move(cur);
        cutoff = next;
    }
}

double qubit_frequency(const DeviceParams& params, const FluxBias& bias,
                       const SolveOptions& opts) {
    return solve_qubit(params, bias, opts, /*with_states=*/false).f01();
}

double charge_matrix_element(const SpectrumResult& spectrum) {
    const auto& g = spectrum.states.at(0);
    const auto& e = spectrum.states.at(1);
    const int dim = static_cast<int>(g.size());
    const int cutoff = (dim - 1) / 2;
    std::complex<double> acc = 0.0;
    for (int i = 0; i < dim; ++i)
        acc += std::conj(e(i)) * double(i - cutoff) * g(i);
    return std::abs(acc);
}

double charge_matrix_element(const DeviceParams& params, const FluxBias& bias,
                             const SolveOptions& opts) {
    return charge_matrix_element(solve_qubit(params, bias, opts));
}

std::vector<std::complex<double>> wavefunction_phase_basis(
    const Eigen::VectorXcd& state, const std::vector<double>& phase_grid) {
    if (phase_grid.empty())
        throw std::invalid_argument("wavefunction_phase_basis: empty phase grid");
    const int dim = static_cast<int>(state.size());
    const int cutoff = (dim - 1) / 2;
    const double norm = 1.0 / std::sqrt(constants::two_pi);

    std::vector<std::complex<double>> psi(phase_grid.size());
    for (std::size_t k = 0; k < phase_grid.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double n = i - cutoff;
            acc += state(i) * std::exp(std::complex<double>(0.0, n * phase_grid[k]));
        }
        psi[k] = acc * norm;
    }
    return psi;
}

}  // namespace fluxq
