#ifndef FLUXQ_LANDSCAPE_HPP
#define FLUXQ_LANDSCAPE_HPP

#include <array>
#include <utility>

#include "fluxq/device.hpp"
#include "fluxq/eigensolver.hpp"
#include "fluxq/flux_map.hpp"

namespace fluxq {

/// Affine map from bias-line currents (I_T, I_B) in mA to loop fluxes
/// (phi_t, phi_b) in Phi_0, plus residual (trapped/ambient) flux offsets.
struct CrosstalkMatrix {
    std::array<std::array<double, 2>, 2> m = {{{1.0, 0.0}, {0.0, 1.0}}};
    std::array<double, 2> offset = {0.0, 0.0};

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    void validate() const;

    FluxBias currents_to_flux(double i_t, double i_b) const;
    std::pair<double, double> flux_to_currents(const FluxBias& flux) const;
};

struct ReadoutModel {
    double f_res_ghz = 7.662;
    double g_mhz = 75.0;
    double kappa_mhz = 1.0;        // total resonator linewidth
    double kappa_ext_ratio = 1.0;  // external-coupling fraction, (0,1]
    double f_probe_ghz = 7.662;
    double dispersive_guard = 10.0;  // require |f01 - f_res| > guard * g

    void validate() const;
    static ReadoutModel from_device(const DeviceParams& p);
};

/// Grid of converged f01 over the two-flux plane. Cells failing to converge
/// carry NaN; aborts when more than 1% of cells fail.
FluxMap sweep_frequency(const DeviceParams& params, const Axis& phi_t_axis,
                        const Axis& phi_b_axis, const SolveOptions& opts = {},
                        int n_threads = 0);

struct ExtremalPoints {
    FluxBias star;      // min f01 on the phi_t = 0 line
    FluxBias triangle;  // max f01 on the phi_t = 0 line
    double f_min = 0.0;
    double f_max = 0.0;
};

/// Argmin/argmax of f01 along the phi_t = 0 row of a frequency map.
/// Ties break toward smaller phi_b.
ExtremalPoints find_extremal_points(const FluxMap& f01_map);

/// Ground-state dispersive pull of the resonator: f_res' = f_res - chi with
/// two-level chi = g^2 / (f01 - f_res). Throws outside the dispersive guard.
double dispersive_resonator_frequency(double f01_ghz, const ReadoutModel& readout);

/// Notch-type resonance magnitude at the fixed probe frequency,
/// |S21| = |1 - (k_ext/k) / (1 + 2i (f_probe - f_res') / k)|.
double notch_s21(double f_res_shifted_ghz, const ReadoutModel& readout);

/// Fixed-probe transmission map over bias-line currents. Cells inside the
/// non-dispersive guard band carry NaN.
FluxMap fixed_probe_map(const DeviceParams& params, const ReadoutModel& readout,
                        const CrosstalkMatrix& xtalk, const Axis& i_t_axis,
                        const Axis& i_b_axis, const SolveOptions& opts = {},
                        int n_threads = 0);

/// Forward-model |S21| sampled on a regular grid over the fundamental domain
/// of the landscape symmetry group, phi_t in [0, 0.5] x phi_b in [0, 1].
/// Every flux point folds into this domain (f01 is even and 1-periodic in
/// phi_t, even and 2-periodic in phi_b). NaN marks the non-dispersive guard
/// band. Row-major, index ib * nt + it.
struct ReferenceS21 {
    int nt = 0;
    int nb = 0;
    std::vector<double> values;

    /// Bilinear read at a folded flux point; corners inside the guard band
    /// are dropped from the blend, all-NaN neighborhoods return NaN.
    double at_folded(double phi_t_folded, double phi_b_folded) const;
};

/// Builds the reference image by solving f01 on the grid and pushing it
/// through the dispersive shift and notch response. One-time cost per
/// device/readout pair; reuse it across calibration runs.
ReferenceS21 reference_s21_image(const DeviceParams& params, const ReadoutModel& readout,
                                 const SolveOptions& opts = {}, int nt = 121, int nb = 241,
                                 int n_threads = 0);

struct CrosstalkFit {
    CrosstalkMatrix estimate;
    double objective_initial = 0.0;
    double objective_final = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct InferOptions {
    double threshold_percentile = 0.10;  // low-|S21| emphasis region
    double objective_abs_tol = 2e-3;     // accept below this residual outright
    double objective_threshold = 0.2;    // or below this fraction of the start
    int max_iterations = 4000;
    double initial_step = 0.05;
};

/// Estimates the crosstalk matrix from a skewed fixed-probe map by weighted
/// least squares against the folded forward-model image: each observed cell,
/// mapped through a candidate affine matrix and folded into the fundamental
/// domain, must reproduce the model |S21| there. Low-transmission cells carry
/// extra weight since they pin the resonant contours. Minimized over the 6
/// affine parameters with a two-stage Nelder-Mead search; throws when the
/// residual fails both acceptance gates.
CrosstalkFit infer_crosstalk(const FluxMap& s21_map, const CrosstalkMatrix& initial_guess,
                             const ReferenceS21& reference, const InferOptions& opts = {});

/// The fit objective on its own, for diagnostics and round-trip checks.
double crosstalk_fit_objective(const FluxMap& s21_map, const CrosstalkMatrix& candidate,
                               const ReferenceS21& reference,
                               double threshold_percentile = 0.10);

}  // namespace fluxq

#endif
