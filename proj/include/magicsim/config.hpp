#pragma once

// Run configuration shared by the config file and the command line.
//
//   [array]       row_size, params, model_include, switch_ropen, switch_rclosed
//   [voltage]     v_input, v_init, v_op, v_read, v_switch_on, v_switch_off,
//                 pulse_width, rise, fall, gap
//   [simulation]  analysis, dt, trace_decimation, switch_threshold, kernel
//   [variation]   seed, sigma_<param>
//
// Every key is also a flag: `--` + key with '_' replaced by '-'.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "magicsim/device.hpp"
#include "magicsim/mapping_ir.hpp"
#include "magicsim/netlist.hpp"
#include "magicsim/schedule.hpp"
#include "magicsim/sim.hpp"

namespace magicsim {

struct RunConfig {
    // array
    std::optional<std::size_t> row_size;
    std::string params = "default";
    std::string model_include = "./vteam.va";
    // voltage
    VoltageConfig volts;
    TimingConfig timing;
    // simulation
    std::string analysis = "tran";
    SimOptions sim;
    // variation
    VariationSpec variation;
};

struct ConfigField {
    std::string section;
    std::string key;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;

    std::string flag() const;
};

// Section names in display order, paired with their help group titles.
struct ConfigSection {
    const char* name;
    const char* group;
};
inline constexpr ConfigSection kConfigSections[] = {
    {"array", "Array parameters"},
    {"voltage", "Voltage parameters"},
    {"simulation", "Simulation parameters"},
    {"variation", "Process variation"},
};

const std::vector<ConfigField>& config_fields();

RunConfig parse_run_config(std::string_view text, std::string_view origin = "config");
RunConfig load_run_config(const std::string& path);
std::string render_run_config(const RunConfig& cfg);
void require_valid(const RunConfig& cfg);

// Widens the plan's row to cfg.row_size; the extra devices stay unused.
ExecutionPlan apply_row_size(ExecutionPlan plan, const RunConfig& cfg);

// Nominal parameter set with per-device variation applied.
std::vector<VteamParams> device_params(const VteamParams& nominal, const VariationSpec& variation, std::size_t n);

EmitConfig make_emit_config(const RunConfig& cfg, const std::string& output_dir);

Kernel parse_kernel(std::string_view text);
const char* to_string(Kernel kernel);

}  // namespace magicsim
