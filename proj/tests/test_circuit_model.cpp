#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "fluxq/circuit_model.hpp"
#include "fluxq/constants.hpp"
#include "fluxq/eigensolver.hpp"

using namespace fluxq;

namespace {

oracles::Matrix to_oracle(const Eigen::MatrixXcd& m) {
    oracles::Matrix a(m.rows(), std::vector<oracles::cplx>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    return a;
}

DeviceParams sample_a() { return device_preset("sample_A"); }

}  // namespace

TEST_CASE("alpha_of_flux") {
    CHECK(alpha_of_flux(0.0, 0.85) == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(alpha_of_flux(0.5, 0.85) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(alpha_of_flux(2.0, 0.85) == doctest::Approx(0.85).epsilon(1e-12));
    // sign preserved
    CHECK(alpha_of_flux(1.0, 0.85) == doctest::Approx(-0.85).epsilon(1e-12));
    // even in phi_b
    for (double pb : {0.1, 0.37, 1.4, -2.6})
        CHECK(alpha_of_flux(pb, 0.7) == alpha_of_flux(-pb, 0.7));
}

TEST_CASE("potential values") {
    DeviceParams p = sample_a();
    CHECK(potential(0.0, {0.0, 0.0}, p) == doctest::Approx(-467.4).epsilon(1e-12));
    CHECK(potential(0.0, {0.5, 0.0}, p) == doctest::Approx(-188.6).epsilon(1e-12));
}

TEST_CASE("potential symmetry U(phi; phi_t) == U(-phi; -phi_t)") {
    DeviceParams p = sample_a();
    for (int i = 0; i < 40; ++i) {
        const double phi = -3.0 + 6.0 * i / 39.0;
        for (double pt : {0.0, 0.13, 0.31, 0.5}) {
            for (double pb : {0.2, 0.9, 1.6}) {
                CHECK(potential(phi, {pt, pb}, p) ==
                      doctest::Approx(potential(-phi, {-pt, pb}, p)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("potential periodicity in phase and tilt") {
    DeviceParams p = sample_a();
    for (double phi : {-1.0, 0.4, 2.2}) {
        CHECK(potential(phi, {0.21, 0.7}, p) ==
              doctest::Approx(potential(phi + constants::two_pi, {0.21, 0.7}, p))
                  .epsilon(1e-12));
        CHECK(potential(phi, {0.21, 0.7}, p) ==
              doctest::Approx(potential(phi, {1.21, 0.7}, p)).epsilon(1e-12));
    }
}

TEST_CASE("build_hamiltonian 3x3 hand-computed entries") {
    DeviceParams p = sample_a();
    const auto h = build_hamiltonian(p, {0.0, 0.0}, 2);
    // cutoff 2 keeps the (0,2) coupling; check the top-left 3x3 block rules
    CHECK(h.entries(0, 0).real() == doctest::Approx(0.5 * 0.5 * 4.0));
    CHECK(h.entries(1, 1).real() == doctest::Approx(0.25));
    CHECK(h.entries(2, 2).real() == doctest::Approx(0.0));
    CHECK(h.entries(0, 1).real() == doctest::Approx(-164.0));
    CHECK(h.entries(1, 2).real() == doctest::Approx(-164.0));
    CHECK(h.entries(0, 2).real() == doctest::Approx(-69.7));
    CHECK(h.entries(0, 2).imag() == doctest::Approx(0.0));
}

TEST_CASE("build_hamiltonian rejects cutoff < 2") {
    CHECK_THROWS_AS(build_hamiltonian(sample_a(), {0.0, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("hermiticity defect < 1e-12 for generated matrices") {
    DeviceParams p = sample_a();
    for (double pt : {0.0, 0.17, -0.42, 0.5})
        for (double pb : {0.0, 0.6, 1.3, 2.0}) {
            const auto h = build_hamiltonian(p, {pt, pb}, 20);
            CHECK(hermiticity_defect(h.entries) < 1e-12);
            CHECK(h.dim() % 2 == 1);
        }
}

TEST_CASE("spectrum periodicity in phi_t (+1) and phi_b (+2)") {
    DeviceParams p = sample_a();
    for (double pt : {0.07, 0.33})
        for (double pb : {0.4, 1.1}) {
            const auto e1 = eigensolve(build_hamiltonian(p, {pt, pb}, 25), 4);
            const auto e2 = eigensolve(build_hamiltonian(p, {pt + 1.0, pb}, 25), 4);
            const auto e3 = eigensolve(build_hamiltonian(p, {pt, pb + 2.0}, 25), 4);
            for (int k = 0; k < 4; ++k) {
                CHECK(e1.levels[k] == doctest::Approx(e2.levels[k]).epsilon(1e-10));
                CHECK(e1.levels[k] == doctest::Approx(e3.levels[k]).epsilon(1e-10));
            }
        }
}

TEST_CASE("spectrum tilt parity") {
    DeviceParams p = sample_a();
    for (double pt : {0.08, 0.21, 0.44}) {
        const auto e1 = eigensolve(build_hamiltonian(p, {pt, 0.8}, 25), 4);
        const auto e2 = eigensolve(build_hamiltonian(p, {-pt, 0.8}, 25), 4);
        for (int k = 0; k < 4; ++k)
            CHECK(e1.levels[k] == doctest::Approx(e2.levels[k]).epsilon(1e-10));
    }
}

TEST_CASE("ground energy matches dense Jacobi oracle at cutoff 40") {
    DeviceParams p = sample_a();
    const auto h = build_hamiltonian(p, {0.0, 0.5}, 40);
    const auto ours = eigensolve(h, 3);
    const auto ref = oracles::jacobi_eigenvalues(to_oracle(h.entries));
    CHECK(ours.levels[0] ==
          doctest::Approx(ref[0]).epsilon(1e-10));
}

TEST_CASE("ground energy sits between potential minimum and plasma scale") {
    DeviceParams p = sample_a();
    for (double pb : {0.3, 0.5, 0.7}) {
        const FluxBias bias{0.0, pb};
        const double u_min = potential_minimum(bias, p);
        const auto spec = solve_qubit(p, bias);
        const double plasma = std::sqrt(2.0 * p.ej_ghz * p.ec_ghz) *
                              (1.0 + 2.0 * std::abs(alpha_of_flux(pb, p.alpha_max)));
        CHECK(spec.levels[0] > u_min);
        CHECK(spec.levels[0] < u_min + plasma);
    }
}

TEST_CASE("device presets mirror the published table") {
    const auto a = device_preset("sample_A");
    CHECK(a.alpha_max == 0.85);
    CHECK(a.ej_ghz == 164.0);
    CHECK(a.ec_ghz == 0.5);
    CHECK(a.c_shunt_ff == 51.0);
    CHECK(a.g_mhz == 75.0);
    CHECK(a.f_res_ghz == 7.662);
    const auto b = device_preset("sample_B");
    CHECK(b.alpha_max == 0.55);
    CHECK(b.ej_ghz == 61.0);
    CHECK(b.ec_ghz == 0.57);
    CHECK(b.g_mhz == 62.0);
    CHECK(b.f_res_ghz == 7.615);
    CHECK_THROWS_AS(device_preset("sample_C"), std::invalid_argument);
}

TEST_CASE("device config parsing: preset plus inline override") {
    const auto p = parse_device_json(R"({"preset": "sample_A", "g_mhz": 80.0})");
    CHECK(p.g_mhz == 80.0);
    CHECK(p.ej_ghz == 164.0);
    // derived total capacitance matches e^2 / (E_C h)
    CHECK(p.c_total_ff == doctest::Approx(p.effective_capacitance_ff()));
    CHECK(p.junction_capacitance_ff() ==
          doctest::Approx((p.effective_capacitance_ff() - 51.0) / (0.85 + 0.5)));
    CHECK_THROWS(parse_device_json(R"({"ej_ghz": -1})"));
}
