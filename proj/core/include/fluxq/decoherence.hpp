#ifndef FLUXQ_DECOHERENCE_HPP
#define FLUXQ_DECOHERENCE_HPP

#include <string>
#include <vector>

#include "fluxq/device.hpp"
#include "fluxq/eigensolver.hpp"
#include "fluxq/landscape.hpp"

namespace fluxq {

struct NoiseEnvironment {
    double temperature_k = 0.025;  // dilution-refrigerator base stage
    double re_z_ohm = 50.0;        // bias-line environmental impedance
    double c_g_ff = 0.22;          // gate capacitance to the environment

    void validate() const;
};

struct T1Budget {
    double f01_ghz = 0.0;
    double t1_purcell_s = 0.0;
    double t1_charge_s = 0.0;
    double t1_total_s = 0.0;
    double q_total = 0.0;  // 2 pi f01 T1_total, f01 in Hz
    bool flagged = false;  // bias root-search failed for this frequency
};

/// Analytic ground-state charge spread n_z = (E_J / 4 E_C)^{1/4}.
double analytic_nz(const DeviceParams& params);

/// Readout-resonator induced relaxation limit,
///   T1 = (2 pi)^2 (f_res - f01)^2 / (g^2 kappa), all frequencies in Hz.
double purcell_limit(double f01_ghz, const ReadoutModel& readout);

/// Quantum charge-noise spectral density in C^2/Hz:
///   S_Q(f) = C_g^2 Re(Z) h f coth(h f / 2 k_B T),
/// with the analytic f -> 0 limit C_g^2 Re(Z) 2 k_B T.
double charge_noise_psd(double f_hz, const NoiseEnvironment& env);

/// Golden-rule relaxation limit from ohmic charge noise. The transition
/// matrix element is n_z * E_C / e with n_z either the analytic value or the
/// numeric |<1|n|0>| from the eigensolver.
double charge_noise_limit(const DeviceParams& params, double f01_ghz,
                          double matrix_element, const NoiseEnvironment& env);

/// Harmonic sum of the two channel rates, plus the quality factor.
T1Budget total_t1(double f01_ghz, const DeviceParams& params, const ReadoutModel& readout,
                  const NoiseEnvironment& env, double matrix_element);

/// Barrier flux realizing a target f01 on the single-well descending branch
/// (phi_t = 0, phi_b in [0.5, 1]), found by bisection to 1e-4 GHz.
double bias_for_frequency(const DeviceParams& params, double target_f01_ghz,
                          const SolveOptions& opts = {});

/// T1 limits tabulated over a frequency axis. When use_numeric_matrix_element
/// is set, each point re-solves the qubit at the bias realizing that f01 and
/// uses the numeric charge matrix element; failures flag the row.
std::vector<T1Budget> t1_curve(const DeviceParams& params, const ReadoutModel& readout,
                               const NoiseEnvironment& env, const Axis& f01_axis,
                               bool use_numeric_matrix_element = false,
                               const SolveOptions& opts = {}, int n_threads = 0);

std::string t1_table_csv(const std::vector<T1Budget>& table);
std::string t1_table_json(const std::vector<T1Budget>& table);
/// Log-T1 line plot of the three limits versus f01.
std::string t1_table_svg(const std::vector<T1Budget>& table);

}  // namespace fluxq

#endif
