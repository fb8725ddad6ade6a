#include "fluxq/decoherence.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "fluxq/constants.hpp"
#include "fluxq/parallel.hpp"
#include "json.hpp"

namespace fluxq {

using namespace constants;

void NoiseEnvironment::validate() const {
    if (temperature_k <= 0.0)
        throw std::invalid_argument("NoiseEnvironment: temperature_k must be > 0");
    if (re_z_ohm < 0.0) throw std::invalid_argument("NoiseEnvironment: re_z_ohm must be >= 0");
    if (c_g_ff < 0.0) throw std::invalid_argument("NoiseEnvironment: c_g_ff must be >= 0");
}

double analytic_nz(const DeviceParams& params) {
    return std::pow(params.ej_ghz / (4.0 * params.ec_ghz), 0.25);
}

double purcell_limit(double f01_ghz, const ReadoutModel& readout) {
    readout.validate();
    const double f01 = f01_ghz * 1e9;
    const double f_res = readout.f_res_ghz * 1e9;
    const double g = readout.g_mhz * 1e6;
    const double kappa = readout.kappa_mhz * 1e6;
    const double detuning = f_res - f01;
    if (detuning == 0.0)
        throw std::domain_error("purcell_limit: on-resonance, Purcell formula invalid");
    return two_pi * two_pi * detuning * detuning / (g * g * kappa);
}

double charge_noise_psd(double f_hz, const NoiseEnvironment& env) {
    env.validate();
    if (f_hz < 0.0) throw std::invalid_argument("charge_noise_psd: f must be >= 0");
    const double cg = env.c_g_ff * 1e-15;
    const double prefactor = cg * cg * env.re_z_ohm;
    const double x = h * f_hz / (2.0 * k_b * env.temperature_k);
    if (x < 1e-12) return prefactor * 2.0 * k_b * env.temperature_k;
    return prefactor * h * f_hz / std::tanh(x);
}

double charge_noise_limit(const DeviceParams& params, double f01_ghz,
                          double matrix_element, const NoiseEnvironment& env) {
    if (matrix_element <= 0.0)
        throw std::invalid_argument("charge_noise_limit: matrix_element must be > 0");
    const double ec_joule = params.ec_ghz * 1e9 * h;
    const double dH_dQ = matrix_element * ec_joule / e;  // J/C
    const double s_q = charge_noise_psd(f01_ghz * 1e9, env);
    const double rate = dH_dQ * dH_dQ * s_q / (hbar * hbar);
    return 1.0 / rate;
}

T1Budget total_t1(double f01_ghz, const DeviceParams& params, const ReadoutModel& readout,
                  const NoiseEnvironment& env, double matrix_element) {
    T1Budget b;
    b.f01_ghz = f01_ghz;
    b.t1_purcell_s = purcell_limit(f01_ghz, readout);
    b.t1_charge_s = charge_noise_limit(params, f01_ghz, matrix_element, env);
    b.t1_total_s = 1.0 / (1.0 / b.t1_purcell_s + 1.0 / b.t1_charge_s);
    b.q_total = two_pi * f01_ghz * 1e9 * b.t1_total_s;
    return b;
}

double bias_for_frequency(const DeviceParams& params, double target_f01_ghz,
                          const SolveOptions& opts) {
    // f01 is monotone decreasing in phi_b on [0.5, 1] at phi_t = 0 for the
    // preset parameter regimes.
    double lo = 0.5, hi = 1.0;
    const double f_lo = qubit_frequency(params, {0.0, lo}, opts);
    const double f_hi = qubit_frequency(params, {0.0, hi}, opts);
    if (target_f01_ghz > f_lo || target_f01_ghz < f_hi)
        throw SolveError("bias_for_frequency: target f01 outside the reachable branch");
    while (true) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = qubit_frequency(params, {0.0, mid}, opts);
        if (std::abs(f_mid - target_f01_ghz) < 1e-4) return mid;
        if (f_mid > target_f01_ghz) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-12)
            throw SolveError("bias_for_frequency: bisection failed to reach tolerance");
    }
}

std::vector<T1Budget> t1_curve(const DeviceParams& params, const ReadoutModel& readout,
                               const NoiseEnvironment& env, const Axis& f01_axis,
                               bool use_numeric_matrix_element, const SolveOptions& opts,
                               int n_threads) {
    f01_axis.validate();
    std::vector<T1Budget> table(f01_axis.count);
    const double nz = analytic_nz(params);

    parallel_for(std::size_t(f01_axis.count), [&](std::size_t i) {
        const double f01 = f01_axis.at(int(i));
        double me = nz;
        bool flagged = false;
        if (use_numeric_matrix_element) {
            try {
                const double phi_b = bias_for_frequency(params, f01, opts);
                me = charge_matrix_element(params, {0.0, phi_b}, opts);
            } catch (const SolveError&) {
                flagged = true;
            }
        }
        table[i] = total_t1(f01, params, readout, env, me);
        table[i].flagged = flagged;
    }, n_threads);
    return table;
}

std::string t1_table_csv(const std::vector<T1Budget>& table) {
    std::ostringstream out;
    out << "f01_ghz,t1_purcell_s,t1_charge_s,t1_total_s,q_total\n";
    char buf[160];
    for (const auto& b : table) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g\n", b.f01_ghz,
                      b.t1_purcell_s, b.t1_charge_s, b.t1_total_s, b.q_total);
        out << buf;
    }
    return out.str();
}

std::string t1_table_json(const std::vector<T1Budget>& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& b : table) {
        rows.push_back({{"f01_ghz", b.f01_ghz},
                        {"t1_purcell_s", b.t1_purcell_s},
                        {"t1_charge_s", b.t1_charge_s},
                        {"t1_total_s", b.t1_total_s},
                        {"q_total", b.q_total},
                        {"flagged", b.flagged}});
    }
    return rows.dump(2);
}

std::string t1_table_svg(const std::vector<T1Budget>& table) {
    const int w = 640, hgt = 480, margin = 50;
    double fmin = 1e300, fmax = -1e300, tmin = 1e300, tmax = -1e300;
    for (const auto& b : table) {
        fmin = std::min(fmin, b.f01_ghz);
        fmax = std::max(fmax, b.f01_ghz);
        for (double t : {b.t1_purcell_s, b.t1_charge_s, b.t1_total_s}) {
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
    }
    const double ltmin = std::log10(tmin), ltmax = std::log10(tmax);
    auto px = [&](double f) {
        return margin + (f - fmin) / std::max(fmax - fmin, 1e-12) * (w - 2 * margin);
    };
    auto py = [&](double t) {
        return hgt - margin -
               (std::log10(t) - ltmin) / std::max(ltmax - ltmin, 1e-12) * (hgt - 2 * margin);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hgt
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* colors[3] = {"#1f77b4", "#d62728", "#000000"};
    const char* labels[3] = {"purcell", "charge", "total"};
    for (int series = 0; series < 3; ++series) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[series]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& b : table) {
            const double t = series == 0   ? b.t1_purcell_s
                             : series == 1 ? b.t1_charge_s
                                           : b.t1_total_s;
            out << px(b.f01_ghz) << "," << py(t) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << (w - margin - 80) << "\" y=\"" << (margin + 16 * (series + 1))
            << "\" fill=\"" << colors[series] << "\" font-size=\"12\">" << labels[series]
            << "</text>\n";
    }
    out << "<text x=\"" << w / 2 << "\" y=\"" << (hgt - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\">f01 (GHz)</text>\n";
    out << "<text x=\"14\" y=\"" << hgt / 2
        << "\" font-size=\"12\" transform=\"rotate(-90 14 " << hgt / 2
        << ")\" text-anchor=\"middle\">T1 (s, log)</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace fluxq
