#pragma once

// VTEAM memristor model with the linear I-V option.
//
//   R(w)  = r_on + (r_off - r_on) * (w_max - w) / (w_max - w_min)
//   dw/dt = k_set   * (v / v_set   - 1)^alpha_set     v >= v_set
//         = k_reset * (v / v_reset - 1)^alpha_reset   v <= v_reset
//         = 0                                          otherwise
//
// w = w_max is the low-resistance state (logic 1). Positive voltage is
// measured from the column terminal to the row terminal.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace magicsim {

struct VteamParams {
    double v_set = 1.2;
    double v_reset = -0.3;
    double k_set = 0.0;
    double k_reset = 0.0;
    double alpha_set = 3.0;
    double alpha_reset = 3.0;
    double w_min = 0.0;
    double w_max = 3e-9;
    double r_on = 10e3;
    double r_off = 1e6;

    bool operator==(const VteamParams&) const = default;
};

// Field table used by the parameter-file reader, the netlist writer and
// the variation sampler. Order is the rendering order.
struct ParamField {
    const char* name;
    double VteamParams::*member;
};
inline constexpr std::array<ParamField, 10> kParamFields{{
    {"v_set", &VteamParams::v_set},
    {"v_reset", &VteamParams::v_reset},
    {"k_set", &VteamParams::k_set},
    {"k_reset", &VteamParams::k_reset},
    {"alpha_set", &VteamParams::alpha_set},
    {"alpha_reset", &VteamParams::alpha_reset},
    {"w_min", &VteamParams::w_min},
    {"w_max", &VteamParams::w_max},
    {"r_on", &VteamParams::r_on},
    {"r_off", &VteamParams::r_off},
}};

struct MemristorState {
    double w = 0.0;
    bool operator==(const MemristorState&) const = default;
};

struct VariationSpec {
    std::map<std::string, double> sigma;  // relative standard deviation per field name
    std::uint64_t seed = 0;

    bool enabled() const;
};

// Empty string when the parameter set is physically consistent.
std::string check_params(const VteamParams& p);
void require_valid(const VteamParams& p);

double resistance(MemristorState s, const VteamParams& p);
double current(double v, MemristorState s, const VteamParams& p);
double state_derivative(double v, MemristorState s, const VteamParams& p);
MemristorState step_state(MemristorState s, double v, double dt, const VteamParams& p);
bool to_logic(MemristorState s, const VteamParams& p);

VteamParams sample_varied_params(const VteamParams& nominal, const VariationSpec& spec, std::size_t device_index);

// The shipped calibrated parameter set.
VteamParams default_params();
// Named preset ("default") or a path to a `name = value` file.
VteamParams load_params(const std::string& name_or_path);
VteamParams parse_params(std::string_view text, std::string_view origin = "params");
std::string render_params(const VteamParams& p);

// Targets for the k-coefficient calibration. A pulse of set_voltage
// (reset_voltage) must drive a fresh device across the full state window
// within settle_fraction * pulse_width.
struct CalibrationTargets {
    double v_set = 1.2;
    double v_reset = -0.3;
    double alpha = 3.0;
    double set_voltage = 2.0;
    double reset_voltage = -0.5;
    double pulse_width = 1.3e-9;
    double settle_fraction = 0.5;
    double dt = 1e-12;
};

// Bisects k_set and k_reset against the explicit-Euler integrator.
VteamParams calibrate_params(const CalibrationTargets& targets, const VteamParams& base = VteamParams{});

// Time for a device held at constant v to travel from the opposite bound
// to the bound v drives toward, integrating with step_state at dt.
// Returns a negative value if it does not arrive within max_time.
double switching_time(const VteamParams& p, double v, double dt, double max_time);

// Resistance at or below which a device reads as logic 1.
inline double logic_threshold_resistance(const VteamParams& p) { return std::sqrt(p.r_on * p.r_off); }

}  // namespace magicsim
