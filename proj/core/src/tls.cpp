#include "fluxq/tls.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fluxq/constants.hpp"
#include "fluxq/parallel.hpp"
#include "json.hpp"

namespace fluxq {

using constants::two_pi;

void TLSDefect::validate() const {
    if (tunneling_ghz <= 0.0) throw std::invalid_argument("TLSDefect: tunneling_ghz must be > 0");
    if (gamma2_mhz <= 0.0) throw std::invalid_argument("TLSDefect: gamma2_mhz must be > 0");
    if (dipole_coupling_mhz_at_ref < 0.0)
        throw std::invalid_argument("TLSDefect: coupling must be >= 0");
}

void SwapSpectrumConfig::validate() const {
    strain_axis.validate();
    freq_axis.validate();
    if (t_swap_us <= 0.0) throw std::invalid_argument("SwapSpectrumConfig: t_swap_us must be > 0");
    if (base_t1_s <= 0.0) throw std::invalid_argument("SwapSpectrumConfig: base_t1_s must be > 0");
}

double tls_frequency(const TLSDefect& defect, double strain) {
    const double eps = defect.asymmetry_0_ghz + defect.strain_coeff_ghz_per_unit * strain;
    return std::hypot(eps, defect.tunneling_ghz);
}

double tls_coupling_at(double f01_ghz, const TLSDefect& defect, double f_ref_ghz,
                       double strain) {
    if (f01_ghz <= 0.0) throw std::invalid_argument("tls_coupling_at: f01 must be > 0");
    const double transverse = defect.tunneling_ghz / tls_frequency(defect, strain);
    return defect.dipole_coupling_mhz_at_ref * std::sqrt(f01_ghz / f_ref_ghz) * transverse;
}

double swap_relaxation_rate(double f01_ghz, const std::vector<TLSDefect>& ensemble,
                            double strain, double f_ref_ghz) {
    double rate = 0.0;
    for (const auto& d : ensemble) {
        const double g = tls_coupling_at(f01_ghz, d, f_ref_ghz, strain) * 1e6 * two_pi;
        const double gamma2 = d.gamma2_mhz * 1e6 * two_pi;
        const double delta = (f01_ghz - tls_frequency(d, strain)) * 1e9 * two_pi;
        rate += 2.0 * g * g * gamma2 / (gamma2 * gamma2 + delta * delta);
    }
    return rate;
}

FluxMap simulate_strain_spectrum(const DeviceParams& /*params*/,
                                 const std::vector<TLSDefect>& ensemble,
                                 const SwapSpectrumConfig& cfg, int n_threads) {
    cfg.validate();
    for (const auto& d : ensemble) d.validate();

    FluxMap map;
    map.x = cfg.strain_axis;
    map.y = cfg.freq_axis;
    map.values.assign(std::size_t(map.x.count) * map.y.count, 0.0);
    const double t_swap = cfg.t_swap_us * 1e-6;

    parallel_for(std::size_t(map.x.count), [&](std::size_t ix) {
        const double strain = map.x.at(int(ix));
        for (int iy = 0; iy < map.y.count; ++iy) {
            const double f01 = map.y.at(iy);
            const double rate = 1.0 / cfg.base_t1_s +
                                swap_relaxation_rate(f01, ensemble, strain, cfg.f_ref_ghz);
            map.at(int(ix), iy) = std::exp(-t_swap * rate);
        }
    }, n_threads);

    map.metadata["quantity"] = "survival_probability";
    map.metadata["t_swap_us"] = std::to_string(cfg.t_swap_us);
    map.metadata["base_t1_s"] = std::to_string(cfg.base_t1_s);
    map.metadata["n_defects"] = std::to_string(ensemble.size());
    return map;
}

double detectability_threshold(double f01_ghz, double base_t1_s, double t_swap_us,
                               double min_contrast, double gamma2_mhz) {
    (void)f01_ghz;  // the threshold is frequency independent once g is on resonance
    if (!(min_contrast > 0.0 && min_contrast < 1.0))
        throw std::invalid_argument("detectability_threshold: min_contrast must be in (0,1)");
    const double t_swap = t_swap_us * 1e-6;
    const double p0 = std::exp(-t_swap / base_t1_s);
    if (min_contrast >= p0)
        throw std::domain_error("detectability_threshold: contrast unreachable, background "
                                "survival is only " + std::to_string(p0));
    // P0 (1 - exp(-t Gamma)) >= c  with on-resonance Gamma = 2 g^2 / gamma2
    const double gamma_needed = -std::log(1.0 - min_contrast / p0) / t_swap;
    const double gamma2 = gamma2_mhz * 1e6 * two_pi;
    const double g_rad = std::sqrt(gamma_needed * gamma2 / 2.0);
    return g_rad / (1e6 * two_pi);
}

int Rng::poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("Rng::poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    // inversion by multiplication; fine for the ensemble sizes used here
    const double limit = std::exp(-mean);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= uniform();
    } while (p > limit);
    return k - 1;
}

std::vector<TLSDefect> sample_ensemble(const EnsembleSamplingParams& p) {
    if (p.density_per_ghz < 0.0)
        throw std::invalid_argument("sample_ensemble: density must be >= 0");
    if (p.f_hi_ghz <= p.f_lo_ghz)
        throw std::invalid_argument("sample_ensemble: invalid frequency window");

    Rng rng(p.seed);
    const double bandwidth = p.f_hi_ghz - p.f_lo_ghz;
    const int count = rng.poisson(p.density_per_ghz * bandwidth);

    std::vector<TLSDefect> ensemble;
    ensemble.reserve(count);
    for (int i = 0; i < count; ++i) {
        TLSDefect d;
        const double energy = rng.uniform(p.f_lo_ghz, p.f_hi_ghz);
        // P(Delta_0) ~ 1/Delta_0 truncated to [delta_min, E]: log-uniform
        const double dmin = std::min(p.delta_min_ghz, energy);
        d.tunneling_ghz = dmin * std::pow(energy / dmin, rng.uniform());
        const double eps = std::sqrt(std::max(energy * energy - d.tunneling_ghz * d.tunneling_ghz, 0.0));
        d.asymmetry_0_ghz = rng.uniform() < 0.5 ? -eps : eps;
        d.strain_coeff_ghz_per_unit = rng.uniform(-p.strain_coeff_max, p.strain_coeff_max);
        d.dipole_coupling_mhz_at_ref = p.dipole_scale_mhz * rng.uniform(0.2, 1.0);
        d.gamma2_mhz = p.gamma2_scale_mhz * rng.uniform(0.5, 1.5);
        ensemble.push_back(d);
    }
    return ensemble;
}

std::string ensemble_to_json(const std::vector<TLSDefect>& ensemble,
                             const EnsembleSamplingParams& p) {
    nlohmann::json j;
    j["sampling"] = {{"density_per_ghz", p.density_per_ghz},
                     {"f_lo_ghz", p.f_lo_ghz},
                     {"f_hi_ghz", p.f_hi_ghz},
                     {"dipole_scale_mhz", p.dipole_scale_mhz},
                     {"gamma2_scale_mhz", p.gamma2_scale_mhz},
                     {"delta_min_ghz", p.delta_min_ghz},
                     {"strain_coeff_max", p.strain_coeff_max},
                     {"seed", p.seed}};
    nlohmann::json defects = nlohmann::json::array();
    for (const auto& d : ensemble) {
        defects.push_back({{"asymmetry_0_ghz", d.asymmetry_0_ghz},
                           {"tunneling_ghz", d.tunneling_ghz},
                           {"strain_coeff_ghz_per_unit", d.strain_coeff_ghz_per_unit},
                           {"dipole_coupling_mhz_at_ref", d.dipole_coupling_mhz_at_ref},
                           {"gamma2_mhz", d.gamma2_mhz}});
    }
    j["defects"] = std::move(defects);
    return j.dump(2);
}

std::vector<TLSDefect> ensemble_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<TLSDefect> ensemble;
    for (const auto& e : j.at("defects")) {
        TLSDefect d;
        d.asymmetry_0_ghz = e.at("asymmetry_0_ghz").get<double>();
        d.tunneling_ghz = e.at("tunneling_ghz").get<double>();
        d.strain_coeff_ghz_per_unit = e.at("strain_coeff_ghz_per_unit").get<double>();
        d.dipole_coupling_mhz_at_ref = e.at("dipole_coupling_mhz_at_ref").get<double>();
        d.gamma2_mhz = e.at("gamma2_mhz").get<double>();
        d.validate();
        ensemble.push_back(d);
    }
    return ensemble;
}

}  // namespace fluxq
