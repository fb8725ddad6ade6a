#ifndef FLUXQ_DEVICE_HPP
#define FLUXQ_DEVICE_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace fluxq {

struct FluxBias {
    double phi_t = 0.0;  // tilt flux, units of Phi_0
    double phi_b = 0.0;  // barrier flux, units of Phi_0
};

/// Circuit constants of one device. Energies are quoted as frequencies
/// (E/h, GHz) so that eigenvalue differences are transition frequencies.
struct DeviceParams {
    double ej_ghz = 0.0;       // Josephson energy of one large junction
    double ec_ghz = 0.0;       // effective charging energy e^2/(C_sh + a_max*C + C/2)
    double alpha_max = 0.0;    // max junction critical-current ratio
    double c_shunt_ff = 0.0;   // shunt capacitance, fF
    double g_mhz = 0.0;        // qubit-resonator coupling
    double f_res_ghz = 0.0;    // bare readout resonator frequency
    double c_total_ff = 0.0;   // total effective capacitance for V_rms

    void validate() const;

    /// Total effective capacitance implied by E_C, in fF.
    double effective_capacitance_ff() const;

    /// Large-junction capacitance C back-solved from E_C and C_sh by
    /// inverting E_C = e^2/(C_sh + a_max*C + C/2); C is never an input.
    double junction_capacitance_ff() const;
};

/// Measured-device presets. Known names: "sample_A", "sample_B".
DeviceParams device_preset(const std::string& name);

/// Load a device block from a JSON config file. The file may either name a
/// preset ({"preset": "sample_A"}) or give the fields inline; inline fields
/// override preset values.
DeviceParams load_device_config(const std::string& path);
DeviceParams parse_device_json(const std::string& json_text);

}  // namespace fluxq

#endif
