// fluxq: command-line front end for the flux-qubit simulation library.
//
// Subcommands: freq, sweep, potential, probe-map, calibrate, t1, tls.
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluxq/constants.hpp"
#include "fluxq/decoherence.hpp"
#include "fluxq/device.hpp"
#include "fluxq/eigensolver.hpp"
#include "fluxq/landscape.hpp"
#include "fluxq/parallel.hpp"
#include "fluxq/tls.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    fluxq::DeviceParams device = fluxq::device_preset("sample_A");
    std::string device_name = "sample_A";
    fluxq::ReadoutModel readout = fluxq::ReadoutModel::from_device(device);
    fluxq::NoiseEnvironment env;
    fluxq::SolveOptions solve;
    fluxq::CrosstalkMatrix xtalk;
    std::string out_dir = ".";
    bool emit_json = false;
    bool emit_svg = false;
    int threads = 0;
    std::uint64_t seed = 0;
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file: " + path);
    json j;
    in >> j;
    if (j.contains("device")) {
        cfg.device = fluxq::parse_device_json(j["device"].dump());
        if (j["device"].contains("preset"))
            cfg.device_name = j["device"]["preset"].get<std::string>();
        cfg.readout = fluxq::ReadoutModel::from_device(cfg.device);
    }
    auto grab = [](const json& src, const char* key, double& field) {
        if (src.contains(key)) field = src[key].get<double>();
    };
    if (j.contains("readout")) {
        const auto& r = j["readout"];
        grab(r, "f_res_ghz", cfg.readout.f_res_ghz);
        grab(r, "g_mhz", cfg.readout.g_mhz);
        grab(r, "kappa_mhz", cfg.readout.kappa_mhz);
        grab(r, "kappa_ext_ratio", cfg.readout.kappa_ext_ratio);
        grab(r, "f_probe_ghz", cfg.readout.f_probe_ghz);
        grab(r, "dispersive_guard", cfg.readout.dispersive_guard);
    }
    if (j.contains("env")) {
        const auto& e = j["env"];
        grab(e, "temperature_k", cfg.env.temperature_k);
        grab(e, "re_z_ohm", cfg.env.re_z_ohm);
        grab(e, "c_g_ff", cfg.env.c_g_ff);
    }
    if (j.contains("solve")) {
        const auto& s = j["solve"];
        grab(s, "f01_rel_tol", cfg.solve.f01_rel_tol);
        if (s.contains("initial_cutoff")) cfg.solve.initial_cutoff = s["initial_cutoff"];
        if (s.contains("max_cutoff")) cfg.solve.max_cutoff = s["max_cutoff"];
        if (s.contains("n_levels")) cfg.solve.n_levels = s["n_levels"];
    }
    if (j.contains("xtalk")) {
        const auto& x = j["xtalk"];
        const auto m = x.at("m");
        cfg.xtalk.m = {{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}};
        if (x.contains("offset"))
            cfg.xtalk.offset = {x["offset"][0], x["offset"][1]};
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
}

json resolved_config_json(const RunConfig& cfg) {
    json j;
    j["device"] = {{"preset", cfg.device_name},
                   {"ej_ghz", cfg.device.ej_ghz},
                   {"ec_ghz", cfg.device.ec_ghz},
                   {"alpha_max", cfg.device.alpha_max},
                   {"c_shunt_ff", cfg.device.c_shunt_ff},
                   {"g_mhz", cfg.device.g_mhz},
                   {"f_res_ghz", cfg.device.f_res_ghz},
                   {"c_total_ff", cfg.device.c_total_ff}};
    j["readout"] = {{"f_res_ghz", cfg.readout.f_res_ghz},
                    {"g_mhz", cfg.readout.g_mhz},
                    {"kappa_mhz", cfg.readout.kappa_mhz},
                    {"kappa_ext_ratio", cfg.readout.kappa_ext_ratio},
                    {"f_probe_ghz", cfg.readout.f_probe_ghz}};
    j["env"] = {{"temperature_k", cfg.env.temperature_k},
                {"re_z_ohm", cfg.env.re_z_ohm},
                {"c_g_ff", cfg.env.c_g_ff}};
    j["solve"] = {{"f01_rel_tol", cfg.solve.f01_rel_tol},
                  {"initial_cutoff", cfg.solve.initial_cutoff},
                  {"max_cutoff", cfg.solve.max_cutoff},
                  {"n_levels", cfg.solve.n_levels}};
    j["seed"] = cfg.seed;
    return j;
}

void stamp_metadata(fluxq::FluxMap& map, const RunConfig& cfg) {
    map.metadata["config"] = resolved_config_json(cfg).dump();
    map.metadata["seed"] = std::to_string(cfg.seed);
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cerr << "wrote " << path.string() << "\n";
}

void emit_map(const fluxq::FluxMap& map, const RunConfig& cfg, const std::string& stem,
              bool log_scale = false, bool invert_gray = false) {
    const fs::path dir(cfg.out_dir);
    write_file(dir / (stem + ".csv"), map.to_csv());
    if (cfg.emit_json) write_file(dir / (stem + ".json"), map.to_json());
    if (cfg.emit_svg) write_file(dir / (stem + ".svg"), map.to_svg(log_scale, invert_gray));
}

// shared flags on every subcommand
struct CommonFlags {
    std::string device_name;
    std::string config_path;

    void attach(CLI::App* cmd, RunConfig& cfg) {
        cmd->add_option("--device", device_name, "Device preset (sample_A, sample_B)");
        cmd->add_option("--config", config_path, "JSON run-config file");
        cmd->add_option("--out", cfg.out_dir, "Output directory");
        cmd->add_flag("--json", cfg.emit_json, "Also emit JSON artifacts");
        cmd->add_flag("--svg", cfg.emit_svg, "Also emit SVG plots");
        cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
        cmd->add_option("--seed", cfg.seed, "Seed for stochastic subcommands");
        cmd->parse_complete_callback([this, &cfg] {
            if (config_path.empty()) {
                if (const char* env = std::getenv("FLUXQ_CONFIG")) config_path = env;
            }
            if (!config_path.empty()) apply_config_file(cfg, config_path);
            if (!device_name.empty()) {
                cfg.device = fluxq::device_preset(device_name);
                cfg.device_name = device_name;
                cfg.readout = fluxq::ReadoutModel::from_device(cfg.device);
            }
        });
    }
};

int cmd_freq(const RunConfig& cfg, double phi_t, double phi_b) {
    const auto spectrum = fluxq::solve_qubit(cfg.device, {phi_t, phi_b}, cfg.solve);
    if (cfg.emit_json) {
        json j;
        j["f01_ghz"] = spectrum.f01();
        j["levels_ghz"] = spectrum.levels;
        j["cutoff_used"] = spectrum.cutoff_used;
        j["converged"] = spectrum.converged;
        j["below_resolution"] = spectrum.below_resolution;
        j["residual"] = spectrum.residual;
        j["config"] = resolved_config_json(cfg);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "f01 = " << spectrum.f01() << " GHz"
                  << (spectrum.below_resolution ? "  (splitting below resolution)" : "")
                  << "\n";
        std::cout << "levels (GHz):\n";
        for (std::size_t k = 0; k < spectrum.levels.size(); ++k)
            std::cout << "  E" << k << " = " << spectrum.levels[k] << "\n";
        std::cout << "cutoff " << spectrum.cutoff_used << ", residual " << spectrum.residual
                  << "\n";
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& phi_t_spec,
              const std::string& phi_b_spec) {
    const auto tx = fluxq::Axis::parse("phi_t", phi_t_spec);
    const auto bx = fluxq::Axis::parse("phi_b", phi_b_spec);

    // per-row checkpoints make long sweeps resumable
    const fs::path dir(cfg.out_dir);
    const fs::path rows_dir = dir / "sweep.rows";
    fs::create_directories(rows_dir);

    fluxq::FluxMap map;
    map.x = tx;
    map.y = bx;
    map.values.assign(std::size_t(tx.count) * bx.count, 0.0);

    for (int iy = 0; iy < bx.count; ++iy) {
        char name[32];
        std::snprintf(name, sizeof(name), "row_%05d.csv", iy);
        const fs::path row_path = rows_dir / name;
        if (fs::exists(row_path)) {
            std::ifstream in(row_path);
            for (int ix = 0; ix < tx.count; ++ix) {
                std::string tok;
                if (!std::getline(in, tok)) throw std::runtime_error("corrupt checkpoint row");
                map.at(ix, iy) = tok == "nan" ? NAN : std::stod(tok);
            }
            continue;
        }
        std::vector<double> row(tx.count, NAN);
        fluxq::parallel_for(std::size_t(tx.count), [&](std::size_t ix) {
            try {
                row[ix] = fluxq::qubit_frequency(cfg.device, {tx.at(int(ix)), bx.at(iy)},
                                                 cfg.solve);
            } catch (const fluxq::SolveError&) {
            }
        }, cfg.threads);
        std::ostringstream rowtext;
        for (int ix = 0; ix < tx.count; ++ix) {
            map.at(ix, iy) = row[ix];
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g\n", row[ix]);
            rowtext << (std::isnan(row[ix]) ? "nan\n" : buf);
        }
        write_file(row_path, rowtext.str());
        std::cerr << "row " << (iy + 1) << "/" << bx.count << "\r";
    }
    std::cerr << "\n";

    const std::size_t failed = map.nan_count();
    if (failed * 100 > map.values.size())
        throw fluxq::SolveError("sweep: more than 1% of cells failed to converge");
    map.metadata["quantity"] = "f01_ghz";
    map.metadata["failed_cells"] = std::to_string(failed);
    RunConfig stamped = cfg;
    stamp_metadata(map, stamped);
    emit_map(map, cfg, "sweep", /*log_scale=*/true);

    const auto ext = fluxq::find_extremal_points(map);
    std::cout << "min f01 " << ext.f_min << " GHz at phi_b=" << ext.star.phi_b
              << "; max f01 " << ext.f_max << " GHz at phi_b=" << ext.triangle.phi_b << "\n";
    return 0;
}

int cmd_potential(const RunConfig& cfg, double phi_t, double phi_b, int grid) {
    const fluxq::FluxBias bias{phi_t, phi_b};
    const auto spectrum = fluxq::solve_qubit(cfg.device, bias, cfg.solve);

    std::vector<double> phis(grid);
    for (int i = 0; i < grid; ++i)
        phis[i] = -fluxq::constants::pi + fluxq::constants::two_pi * i / grid;

    const int n_states = std::min<int>(3, int(spectrum.states.size()));
    std::vector<std::vector<std::complex<double>>> psi;
    for (int k = 0; k < n_states; ++k)
        psi.push_back(fluxq::wavefunction_phase_basis(spectrum.states[k], phis));

    std::ostringstream out;
    out << "# phi_t," << phi_t << ",phi_b," << phi_b << "\n";
    out << "phi,u_ghz";
    for (int k = 0; k < n_states; ++k) out << ",e" << k << "_ghz,psi" << k << "_abs2";
    out << "\n";
    for (int i = 0; i < grid; ++i) {
        out << phis[i] << "," << fluxq::potential(phis[i], bias, cfg.device);
        for (int k = 0; k < n_states; ++k)
            out << "," << spectrum.levels[k] << "," << std::norm(psi[k][i]);
        out << "\n";
    }
    write_file(fs::path(cfg.out_dir) / "potential.csv", out.str());
    return 0;
}

int cmd_probe_map(const RunConfig& cfg, const std::string& i_t_spec,
                  const std::string& i_b_spec) {
    const auto tx = fluxq::Axis::parse("i_t_ma", i_t_spec);
    const auto bx = fluxq::Axis::parse("i_b_ma", i_b_spec);
    auto map = fluxq::fixed_probe_map(cfg.device, cfg.readout, cfg.xtalk, tx, bx, cfg.solve,
                                      cfg.threads);
    RunConfig stamped = cfg;
    stamp_metadata(map, stamped);
    emit_map(map, cfg, "probe_map");
    return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& map_file) {
    const auto map = fluxq::FluxMap::load(map_file);
    // the map records the probe settings it was taken with; honor them
    fluxq::ReadoutModel readout = cfg.readout;
    if (auto it = map.metadata.find("f_probe_ghz"); it != map.metadata.end())
        readout.f_probe_ghz = std::stod(it->second);
    if (auto it = map.metadata.find("kappa_mhz"); it != map.metadata.end())
        readout.kappa_mhz = std::stod(it->second);
    const auto reference = fluxq::reference_s21_image(cfg.device, readout, cfg.solve, 121,
                                                      241, cfg.threads);
    const auto fit = fluxq::infer_crosstalk(map, cfg.xtalk, reference);
    json j;
    j["m"] = {{fit.estimate.m[0][0], fit.estimate.m[0][1]},
              {fit.estimate.m[1][0], fit.estimate.m[1][1]}};
    j["offset"] = {fit.estimate.offset[0], fit.estimate.offset[1]};
    j["objective_initial"] = fit.objective_initial;
    j["objective_final"] = fit.objective_final;
    j["iterations"] = fit.iterations;
    std::cout << j.dump(2) << "\n";
    write_file(fs::path(cfg.out_dir) / "crosstalk.json", j.dump(2));
    return 0;
}

int cmd_t1(const RunConfig& cfg, const std::string& f01_spec, bool numeric_me) {
    const auto axis = fluxq::Axis::parse("f01_ghz", f01_spec);
    const auto table = fluxq::t1_curve(cfg.device, cfg.readout, cfg.env, axis, numeric_me,
                                       cfg.solve, cfg.threads);
    const fs::path dir(cfg.out_dir);
    write_file(dir / "t1.csv", fluxq::t1_table_csv(table));
    if (cfg.emit_json) write_file(dir / "t1.json", fluxq::t1_table_json(table));
    if (cfg.emit_svg) write_file(dir / "t1.svg", fluxq::t1_table_svg(table));
    return 0;
}

int cmd_tls(const RunConfig& cfg, const std::string& strain_spec, const std::string& freq_spec,
            double density, double dipole_scale, double gamma2_scale, double t_swap_us,
            double base_t1_us) {
    fluxq::SwapSpectrumConfig scfg;
    scfg.strain_axis = fluxq::Axis::parse("strain", strain_spec);
    scfg.freq_axis = fluxq::Axis::parse("f01_ghz", freq_spec);
    scfg.t_swap_us = t_swap_us;
    scfg.base_t1_s = base_t1_us * 1e-6;
    scfg.f_ref_ghz = 0.5 * (scfg.freq_axis.start + scfg.freq_axis.stop);

    fluxq::EnsembleSamplingParams sp;
    sp.density_per_ghz = density;
    sp.f_lo_ghz = scfg.freq_axis.start;
    sp.f_hi_ghz = scfg.freq_axis.stop;
    sp.dipole_scale_mhz = dipole_scale;
    sp.gamma2_scale_mhz = gamma2_scale;
    sp.seed = cfg.seed;

    const auto ensemble = fluxq::sample_ensemble(sp);
    auto map = fluxq::simulate_strain_spectrum(cfg.device, ensemble, scfg, cfg.threads);
    RunConfig stamped = cfg;
    stamp_metadata(map, stamped);

    const fs::path dir(cfg.out_dir);
    write_file(dir / "tls_ensemble.json", fluxq::ensemble_to_json(ensemble, sp));
    write_file(dir / "tls_spectrum.csv", map.to_csv());
    if (cfg.emit_json) write_file(dir / "tls_spectrum.json", map.to_json());
    if (cfg.emit_svg)
        write_file(dir / "tls_spectrum.svg", map.to_svg(false, /*invert_gray=*/false));
    std::cout << "sampled " << ensemble.size() << " defects (seed " << cfg.seed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for gradiometric, gap-tunable, C-shunted flux qubits"};
    app.require_subcommand(1);

    RunConfig cfg;
    CommonFlags common[7];

    double phi_t = 0.0, phi_b = 0.0;
    int potential_grid = 512;
    std::string phi_t_spec, phi_b_spec, i_t_spec, i_b_spec, f01_spec, map_file;
    std::string strain_spec = "-1:1:101", tls_freq_spec = "3:6:101";
    bool numeric_me = false;
    double density = 2.0, dipole_scale = 1.0, gamma2_scale = 1.0;
    double t_swap_us = 5.0, base_t1_us = 25.0;

    auto* freq = app.add_subcommand("freq", "f01 and level table at one bias point");
    common[0].attach(freq, cfg);
    freq->add_option("--phi-t", phi_t, "Tilt flux in Phi_0")->required();
    freq->add_option("--phi-b", phi_b, "Barrier flux in Phi_0")->required();

    auto* sweep = app.add_subcommand("sweep", "f01 map over the two-flux plane");
    common[1].attach(sweep, cfg);
    sweep->add_option("--phi-t", phi_t_spec, "Tilt axis start:stop:count")->required();
    sweep->add_option("--phi-b", phi_b_spec, "Barrier axis start:stop:count")->required();

    auto* pot = app.add_subcommand("potential", "U(phi) and lowest wavefunctions");
    common[2].attach(pot, cfg);
    pot->add_option("--phi-t", phi_t, "Tilt flux in Phi_0");
    pot->add_option("--phi-b", phi_b, "Barrier flux in Phi_0");
    pot->add_option("--grid", potential_grid, "Phase grid points");

    auto* probe = app.add_subcommand("probe-map", "fixed-probe |S21| map over bias currents");
    common[3].attach(probe, cfg);
    probe->add_option("--i-t", i_t_spec, "Tilt current axis start:stop:count")->required();
    probe->add_option("--i-b", i_b_spec, "Barrier current axis start:stop:count")->required();

    auto* cal = app.add_subcommand("calibrate", "fit a crosstalk matrix to a probe map");
    common[4].attach(cal, cfg);
    cal->add_option("map", map_file, "Probe map CSV/JSON file")->required();

    auto* t1 = app.add_subcommand("t1", "relaxation limits over a frequency axis");
    common[5].attach(t1, cfg);
    t1->add_option("--f01", f01_spec, "Frequency axis start:stop:count (GHz)")->required();
    t1->add_flag("--numeric-me", numeric_me, "Use the numeric charge matrix element");

    auto* tls = app.add_subcommand("tls", "strain-tuned swap-spectroscopy map");
    common[6].attach(tls, cfg);
    tls->add_option("--strain", strain_spec, "Strain axis start:stop:count");
    tls->add_option("--freq", tls_freq_spec, "Frequency axis start:stop:count (GHz)");
    tls->add_option("--density", density, "Defect density per GHz");
    tls->add_option("--dipole-scale", dipole_scale, "Vertex coupling scale (MHz)");
    tls->add_option("--gamma2-scale", gamma2_scale, "TLS decoherence scale (MHz)");
    tls->add_option("--t-swap", t_swap_us, "Swap pulse duration (us)");
    tls->add_option("--base-t1", base_t1_us, "Background qubit T1 (us)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 2;
    } catch (const std::invalid_argument& err) {
        // option callbacks (preset lookup, config parsing) surface here
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }

    try {
        if (*freq) return cmd_freq(cfg, phi_t, phi_b);
        if (*sweep) return cmd_sweep(cfg, phi_t_spec, phi_b_spec);
        if (*pot) return cmd_potential(cfg, phi_t, phi_b, potential_grid);
        if (*probe) return cmd_probe_map(cfg, i_t_spec, i_b_spec);
        if (*cal) return cmd_calibrate(cfg, map_file);
        if (*t1) return cmd_t1(cfg, f01_spec, numeric_me);
        if (*tls)
            return cmd_tls(cfg, strain_spec, tls_freq_spec, density, dipole_scale,
                           gamma2_scale, t_swap_us, base_t1_us);
    } catch (const std::invalid_argument& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
