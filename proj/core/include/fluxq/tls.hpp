#ifndef FLUXQ_TLS_HPP
#define FLUXQ_TLS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fluxq/device.hpp"
#include "fluxq/flux_map.hpp"

namespace fluxq {

/// One tunneling defect in the standard (asymmetry, tunneling) model with a
/// linear strain response of the asymmetry energy.
struct TLSDefect {
    double asymmetry_0_ghz = 0.0;          // epsilon_0 / h at zero strain
    double tunneling_ghz = 1.0;            // Delta_0 / h
    double strain_coeff_ghz_per_unit = 0.0;
    double dipole_coupling_mhz_at_ref = 0.0;  // g at f_ref, on the hyperbola vertex
    double gamma2_mhz = 1.0;               // TLS decoherence rate

    void validate() const;
};

struct SwapSpectrumConfig {
    Axis strain_axis{"strain", -1.0, 1.0, 101};
    Axis freq_axis{"f01_ghz", 3.0, 6.0, 101};
    double t_swap_us = 5.0;
    double base_t1_s = 25e-6;
    double f_ref_ghz = 5.0;  // reference frequency for the dipole coupling

    void validate() const;
};

/// Defect transition frequency sqrt(eps^2 + Delta_0^2) with
/// eps = eps_0 + c * strain, in GHz.
double tls_frequency(const TLSDefect& defect, double strain);

/// Qubit-defect coupling in MHz: the vertex coupling, scaled by the qubit
/// zero-point voltage growth sqrt(f01/f_ref) and the transverse dipole
/// projection Delta_0 / E(strain).
double tls_coupling_at(double f01_ghz, const TLSDefect& defect, double f_ref_ghz,
                       double strain);

/// Extra qubit energy decay rate (1/s) from incoherent energy exchange with
/// the ensemble: sum of Lorentzians 2 g^2 gamma2 / (gamma2^2 + delta^2) in
/// angular-frequency units.
double swap_relaxation_rate(double f01_ghz, const std::vector<TLSDefect>& ensemble,
                            double strain, double f_ref_ghz);

/// Excited-state survival map P(strain, f01) = exp(-t_swap (1/T1 + Gamma)).
FluxMap simulate_strain_spectrum(const DeviceParams& params,
                                 const std::vector<TLSDefect>& ensemble,
                                 const SwapSpectrumConfig& cfg, int n_threads = 0);

/// Smallest on-resonance coupling (MHz) whose survival dip reaches
/// min_contrast against the background decay, for a defect with the given
/// decoherence rate. Closed-form inversion of the exponential model.
double detectability_threshold(double f01_ghz, double base_t1_s, double t_swap_us,
                               double min_contrast, double gamma2_mhz = 1.0);

/// Deterministic, platform-stable PRNG: the mt19937_64 engine (whose output
/// sequence is pinned by the standard) with explicit double/Poisson
/// derivations, independent of the non-portable stdlib distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int poisson(double mean);

  private:
    std::mt19937_64 engine_;
};

struct EnsembleSamplingParams {
    double density_per_ghz = 1.0;
    double f_lo_ghz = 3.0;
    double f_hi_ghz = 6.0;
    double dipole_scale_mhz = 1.0;   // vertex couplings drawn in (0.2, 1] * scale
    double gamma2_scale_mhz = 1.0;   // gamma2 drawn in [0.5, 1.5) * scale
    double delta_min_ghz = 0.05;     // truncation of the 1/Delta_0 law
    double strain_coeff_max = 2.0;   // |d eps / d strain| upper bound, GHz/unit
    std::uint64_t seed = 0;
};

/// Poisson-count ensemble whose zero-strain frequencies are uniform in the
/// window, with tunneling energies log-uniform (the 1/Delta_0 law truncated
/// at delta_min). Bit-identical for identical seeds.
std::vector<TLSDefect> sample_ensemble(const EnsembleSamplingParams& p);

std::string ensemble_to_json(const std::vector<TLSDefect>& ensemble,
                             const EnsembleSamplingParams& p);
std::vector<TLSDefect> ensemble_from_json(const std::string& text);

}  // namespace fluxq

#endif
