#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "fluxq/circuit_model.hpp"
#include "fluxq/constants.hpp"
#include "fluxq/eigensolver.hpp"

using namespace fluxq;

namespace {

DeviceParams sample_a() { return device_preset("sample_A"); }

oracles::Matrix to_oracle(const Eigen::MatrixXcd& m) {
    oracles::Matrix a(m.rows(), std::vector<oracles::cplx>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    return a;
}

// Frozen regression constant, pinned by the dense diagonalization oracle:
// sample A at (phi_t=0, phi_b=0.5), converged in cutoff.
constexpr double kSampleAF01AtAlphaZero = 12.743439469717;

}  // namespace

TEST_CASE("3x3 example matrix matches characteristic-polynomial roots") {
    ChargeBasisOperator h;
    h.cutoff_n = 1;
    h.entries = Eigen::MatrixXcd::Zero(3, 3);
    h.entries << 0.25, -164.0, -69.7, -164.0, 0.0, -164.0, -69.7, -164.0, 0.25;
    const auto roots = oracles::char3_eigenvalues(to_oracle(h.entries));
    const auto spec = eigensolve(h, 3);
    for (int k = 0; k < 3; ++k)
        CHECK(spec.levels[k] == doctest::Approx(roots[k]).epsilon(1e-12));
}

TEST_CASE("zero matrix eigensolve") {
    ChargeBasisOperator h;
    h.cutoff_n = 2;
    h.entries = Eigen::MatrixXcd::Zero(5, 5);
    const auto spec = eigensolve(h, 5);
    for (double level : spec.levels) CHECK(level == doctest::Approx(0.0));
    // orthonormal basis
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const auto dot = spec.states[i].dot(spec.states[j]);
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("eigenpair residual max|Hv - lambda v| < 1e-9 max|H|") {
    const auto h = build_hamiltonian(sample_a(), {0.13, 0.8}, 30);
    const auto spec = eigensolve(h, 5);
    const double scale = h.entries.cwiseAbs().maxCoeff();
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXcd r = h.entries * spec.states[k] - spec.levels[k] * spec.states[k];
        CHECK(r.cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
}

TEST_CASE("eigensolve rejects n_levels > dimension") {
    const auto h = build_hamiltonian(sample_a(), {0.0, 0.0}, 2);
    CHECK_THROWS_AS(eigensolve(h, 6), std::invalid_argument);
}

TEST_CASE("oracle equivalence for cutoffs <= 8") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> bias_dist(-1.0, 2.0);
    for (const char* name : {"sample_A", "sample_B"}) {
        const auto p = device_preset(name);
        for (int cutoff = 2; cutoff <= 8; ++cutoff) {
            const FluxBias bias{bias_dist(gen), bias_dist(gen)};
            const auto h = build_hamiltonian(p, bias, cutoff);
            const auto ours = eigensolve(h, h.dim());
            const auto ref = oracles::jacobi_eigenvalues(to_oracle(h.entries));
            const double scale = std::abs(ref.back()) + std::abs(ref.front());
            for (int k = 0; k < h.dim(); ++k)
                CHECK(std::abs(ours.levels[k] - ref[k]) < 1e-9 * scale);
        }
    }
}

TEST_CASE("qubit_frequency converges near the harmonic estimate at alpha=0") {
    const auto p = sample_a();
    const auto spec = solve_qubit(p, {0.0, 0.5});
    CHECK(spec.converged);
    CHECK(spec.residual < 1e-8);
    const double harmonic = std::sqrt(2.0 * p.ej_ghz * p.ec_ghz);  // 12.81 GHz
    CHECK(spec.f01() == doctest::Approx(harmonic).epsilon(0.02));
    CHECK(spec.f01() == doctest::Approx(kSampleAF01AtAlphaZero).epsilon(1e-9));
}

TEST_CASE("convergence: final doubling changes f01 below tolerance (Cauchy tail)") {
    const auto p = sample_a();
    SolveOptions opts;
    opts.f01_rel_tol = 1e-8;
    const auto spec = solve_qubit(p, {0.1, 0.7}, opts);
    CHECK(spec.converged);
    // re-solve at double the final cutoff; f01 must be stable
    const auto h = build_hamiltonian(p, {0.1, 0.7}, std::min(2 * spec.cutoff_used, 200));
    const auto refined = eigensolve(h, 2);
    CHECK(std::abs(refined.f01() - spec.f01()) / spec.f01() < 1e-8);
}

TEST_CASE("non-convergence at max_cutoff raises with diagnostics") {
    SolveOptions opts;
    opts.f01_rel_tol = 1e-15;  // unreachable
    opts.initial_cutoff = 2;
    opts.max_cutoff = 4;
    CHECK_THROWS_AS(solve_qubit(sample_a(), {0.0, 0.5}, opts), SolveError);
}

TEST_CASE("f01 tilt parity on a sampled grid") {
    const auto p = sample_a();
    for (double pt : {0.05, 0.2, 0.35})
        for (double pb : {0.4, 0.7}) {
            const double f1 = qubit_frequency(p, {pt, pb});
            const double f2 = qubit_frequency(p, {-pt, pb});
            CHECK(f1 == doctest::Approx(f2).epsilon(1e-8));
        }
}

TEST_CASE("orthonormality: Gram matrix deviation < 1e-9") {
    const auto spec = solve_qubit(sample_a(), {0.2, 0.9});
    const int n = int(spec.states.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto dot = spec.states[i].dot(spec.states[j]);
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
}

TEST_CASE("spectral floor: eigenvalues above the potential minimum") {
    const auto p = sample_a();
    for (double pb : {0.0, 0.5, 1.0, 1.5}) {
        const FluxBias bias{0.1, pb};
        const auto spec = solve_qubit(p, bias);
        const double u_min = potential_minimum(bias, p);
        for (double level : spec.levels) CHECK(level >= u_min);
    }
}

TEST_CASE("charge matrix element near harmonic value at alpha=0") {
    const auto p = sample_a();
    const double me = charge_matrix_element(p, {0.0, 0.5});
    const double harmonic = std::pow(p.ej_ghz / (2.0 * p.ec_ghz), 0.25);  // 3.58
    CHECK(me == doctest::Approx(harmonic).epsilon(0.05));
    // the published analytic value sits a factor 2^{1/4} lower
    const double nz = std::pow(p.ej_ghz / (4.0 * p.ec_ghz), 0.25);
    CHECK(nz == doctest::Approx(3.01).epsilon(0.01));
    CHECK(me / nz == doctest::Approx(std::pow(2.0, 0.25)).epsilon(0.02));
}

TEST_CASE("matrix element collapses in the deep double well") {
    const auto p = sample_a();
    const double single_well = charge_matrix_element(p, {0.0, 0.5});
    const double double_well = charge_matrix_element(p, {0.0, 1.0});
    CHECK(double_well < 1e-3 * single_well);  // orders of magnitude drop
}

TEST_CASE("wavefunction: single charge basis state is flat") {
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(21);
    state(10) = 1.0;  // n = 0
    std::vector<double> grid;
    for (int i = 0; i < 64; ++i)
        grid.push_back(-constants::pi + constants::two_pi * i / 64);
    const auto psi = wavefunction_phase_basis(state, grid);
    const double expected = 1.0 / std::sqrt(constants::two_pi);
    for (const auto& amp : psi) {
        CHECK(amp.real() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(amp.imag()) < 1e-12);
    }
}

TEST_CASE("wavefunction: empty grid rejected") {
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(5);
    state(2) = 1.0;
    CHECK_THROWS_AS(wavefunction_phase_basis(state, {}), std::invalid_argument);
}

namespace {

std::vector<double> phase_grid(int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = -constants::pi + constants::two_pi * i / n;
    return grid;
}

double trapezoid_norm(const std::vector<std::complex<double>>& psi, double dphi) {
    // periodic grid: trapezoid equals the rectangle sum
    double acc = 0.0;
    for (const auto& a : psi) acc += std::norm(a);
    return acc * dphi;
}

}  // namespace

TEST_CASE("Parseval: phase-basis norm equals charge-basis norm") {
    const auto spec = solve_qubit(sample_a(), {0.1, 0.9});
    const auto grid = phase_grid(512);
    for (const auto& state : spec.states) {
        const auto psi = wavefunction_phase_basis(state, grid);
        CHECK(trapezoid_norm(psi, constants::two_pi / 512) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("ground state: single peak at alpha=0, symmetric") {
    const auto spec = solve_qubit(sample_a(), {0.0, 0.5});
    const int n = 257;
    const auto grid = phase_grid(n);
    const auto psi = wavefunction_phase_basis(spec.states[0], grid);
    int peak = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
    CHECK(std::abs(grid[peak]) < constants::two_pi / n + 1e-9);
    for (int i = 1; i < n / 2; ++i)
        CHECK(std::abs(psi[i]) == doctest::Approx(std::abs(psi[n - i])).epsilon(1e-8));
}

TEST_CASE("ground state: two symmetric peaks in the double-well regime") {
    const auto p = sample_a();
    const FluxBias bias{0.0, 1.0};
    const auto spec = solve_qubit(p, bias);
    const int n = 1024;
    const auto grid = phase_grid(n);
    const auto psi = wavefunction_phase_basis(spec.states[0], grid);

    // count interior local maxima of |psi|
    std::vector<double> peaks;
    for (int i = 1; i + 1 < n; ++i) {
        const double a = std::abs(psi[i]);
        if (a > std::abs(psi[i - 1]) && a > std::abs(psi[i + 1]) && a > 0.05)
            peaks.push_back(grid[i]);
    }
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0] == doctest::Approx(-peaks[1]).epsilon(1e-2));

    // peak positions match the minima of the potential
    double u_best = 1e300, phi_best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = potential(grid[i], bias, p);
        if (grid[i] > 0 && u < u_best) { u_best = u; phi_best = grid[i]; }
    }
    CHECK(peaks[1] == doctest::Approx(phi_best).epsilon(0.05));
}
