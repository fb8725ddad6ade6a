#include "fluxq/device.hpp"

#include <fstream>
#include <sstream>

#include "fluxq/constants.hpp"
#include "json.hpp"

namespace fluxq {

void DeviceParams::validate() const {
    if (ej_ghz <= 0.0) throw std::invalid_argument("DeviceParams: ej_ghz must be > 0");
    if (ec_ghz <= 0.0) throw std::invalid_argument("DeviceParams: ec_ghz must be > 0");
    if (alpha_max <= 0.0 || alpha_max >= 1.0)
        throw std::invalid_argument("DeviceParams: alpha_max must be in (0,1)");
    if (c_shunt_ff <= 0.0) throw std::invalid_argument("DeviceParams: c_shunt_ff must be > 0");
    if (f_res_ghz <= 0.0) throw std::invalid_argument("DeviceParams: f_res_ghz must be > 0");
}

double DeviceParams::effective_capacitance_ff() const {
    using namespace constants;
    const double ec_joule = ec_ghz * 1e9 * h;
    return e * e / ec_joule * 1e15;
}

double DeviceParams::junction_capacitance_ff() const {
    const double c_eff = effective_capacitance_ff();
    return (c_eff - c_shunt_ff) / (alpha_max + 0.5);
}

namespace {

DeviceParams finish(DeviceParams p) {
    p.validate();
    if (p.c_total_ff <= 0.0) p.c_total_ff = p.effective_capacitance_ff();
    return p;
}

}  // namespace

DeviceParams device_preset(const std::string& name) {
    DeviceParams p;
    if (name == "sample_A") {
        p.alpha_max = 0.85;
        p.ej_ghz = 164.0;
        p.ec_ghz = 0.5;
        p.c_shunt_ff = 51.0;
        p.g_mhz = 75.0;
        p.f_res_ghz = 7.662;
    } else if (name == "sample_B") {
        p.alpha_max = 0.55;
        p.ej_ghz = 61.0;
        p.ec_ghz = 0.57;
        p.c_shunt_ff = 51.0;
        p.g_mhz = 62.0;
        p.f_res_ghz = 7.615;
    } else {
        throw std::invalid_argument("unknown device preset: " + name);
    }
    return finish(p);
}

DeviceParams parse_device_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    DeviceParams p;
    if (j.contains("preset")) p = device_preset(j.at("preset").get<std::string>());
    auto grab = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>();
    };
    grab("ej_ghz", p.ej_ghz);
    grab("ec_ghz", p.ec_ghz);
    grab("alpha_max", p.alpha_max);
    grab("c_shunt_ff", p.c_shunt_ff);
    grab("g_mhz", p.g_mhz);
    grab("f_res_ghz", p.f_res_ghz);
    grab("c_total_ff", p.c_total_ff);
    return finish(p);
}

DeviceParams load_device_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open device config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_device_json(ss.str());
}

}  // namespace fluxq
