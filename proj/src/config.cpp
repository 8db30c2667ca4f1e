#include "magicsim/config.hpp"

#include <charconv>
#include <map>

#include "magicsim/error.hpp"
#include "magicsim/format.hpp"
#include "magicsim/keyvalue.hpp"

namespace magicsim {

namespace {

double parse_double(const std::string& s, const std::string& key) {
    KeyValue kv{"", key, s, 0};
    return to_double(kv, key);
}

std::uint64_t parse_uint(const std::string& s, const std::string& key) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
    return v;
}

template <class Sub>
ConfigField real(std::string section, std::string key, std::string help, Sub RunConfig::*outer, double Sub::*inner) {
    return {section, key, help,
            [outer, inner, key](RunConfig& c, const std::string& s) { (c.*outer).*inner = parse_double(s, key); },
            [outer, inner](const RunConfig& c) { return spice_number((c.*outer).*inner); }};
}

std::vector<ConfigField> build_fields() {
    std::vector<ConfigField> f;
    f.push_back({"array", "row_size", "Number of devices in the row (pads the plan's row)",
                 [](RunConfig& c, const std::string& s) { c.row_size = static_cast<std::size_t>(parse_uint(s, "row_size")); },
                 [](const RunConfig& c) { return c.row_size ? std::to_string(*c.row_size) : std::string("plan"); }});
    f.push_back({"array", "params", "Device parameter set: 'default' or a preset file",
                 [](RunConfig& c, const std::string& s) { c.params = s; }, [](const RunConfig& c) { return c.params; }});
    f.push_back({"array", "model_include", "Path of the device model included by the netlist",
                 [](RunConfig& c, const std::string& s) { c.model_include = s; },
                 [](const RunConfig& c) { return c.model_include; }});
    f.push_back(real("array", "switch_ropen", "Open relay resistance (ohm)", &RunConfig::sim, &SimOptions::switch_open_resistance));
    f.push_back(real("array", "switch_rclosed", "Closed relay resistance (ohm)", &RunConfig::sim, &SimOptions::switch_closed_resistance));

    f.push_back(real("voltage", "v_input", "Load-phase write voltage for input 1s (V)", &RunConfig::volts, &VoltageConfig::v_input));
    f.push_back(real("voltage", "v_init", "Init/Reinit SET voltage (V)", &RunConfig::volts, &VoltageConfig::v_init));
    f.push_back(real("voltage", "v_op", "Gate execution voltage on operand columns (V)", &RunConfig::volts, &VoltageConfig::v_op));
    f.push_back(real("voltage", "v_read", "Read voltage (V)", &RunConfig::volts, &VoltageConfig::v_read));
    f.push_back(real("voltage", "v_switch_on", "Relay control level when closed (V)", &RunConfig::volts, &VoltageConfig::v_switch_on));
    f.push_back(real("voltage", "v_switch_off", "Relay control level when open (V)", &RunConfig::volts, &VoltageConfig::v_switch_off));
    f.push_back(real("voltage", "pulse_width", "Pulse plateau width (s)", &RunConfig::timing, &TimingConfig::pulse_width));
    f.push_back(real("voltage", "rise", "Pulse rise time (s)", &RunConfig::timing, &TimingConfig::rise));
    f.push_back(real("voltage", "fall", "Pulse fall time (s)", &RunConfig::timing, &TimingConfig::fall));
    f.push_back(real("voltage", "gap", "Idle time between cycles (s)", &RunConfig::timing, &TimingConfig::gap));

    f.push_back({"simulation", "analysis", "Analysis kind (only 'tran')",
                 [](RunConfig& c, const std::string& s) { c.analysis = s; }, [](const RunConfig& c) { return c.analysis; }});
    f.push_back(real("simulation", "dt", "Fixed time step (s)", &RunConfig::sim, &SimOptions::dt));
    f.push_back({"simulation", "trace_decimation", "Keep every Nth step in the trace",
                 [](RunConfig& c, const std::string& s) {
                     c.sim.trace_decimation = static_cast<std::size_t>(parse_uint(s, "trace_decimation"));
                 },
                 [](const RunConfig& c) { return std::to_string(c.sim.trace_decimation); }});
    f.push_back(real("simulation", "switch_threshold", "Relay closes when its control exceeds this (V)", &RunConfig::sim,
                     &SimOptions::switch_control_threshold));
    f.push_back({"simulation", "kernel", "Row solver: serial, openmp or auto",
                 [](RunConfig& c, const std::string& s) { c.sim.kernel = parse_kernel(s); },
                 [](const RunConfig& c) { return std::string(to_string(c.sim.kernel)); }});

    f.push_back({"variation", "seed", "Seed for per-device parameter sampling",
                 [](RunConfig& c, const std::string& s) { c.variation.seed = parse_uint(s, "seed"); },
                 [](const RunConfig& c) { return std::to_string(c.variation.seed); }});
    for (const auto& pf : kParamFields) {
        const std::string name = pf.name;
        f.push_back({"variation", "sigma_" + name, "Relative std. deviation of " + name,
                     [name](RunConfig& c, const std::string& s) {
                         const double v = parse_double(s, "sigma_" + name);
                         if (v == 0.0) c.variation.sigma.erase(name);
                         else c.variation.sigma[name] = v;
                     },
                     [name](const RunConfig& c) {
                         auto it = c.variation.sigma.find(name);
                         return spice_number(it == c.variation.sigma.end() ? 0.0 : it->second);
                     }});
    }
    return f;
}

}  // namespace

std::string ConfigField::flag() const {
    std::string s = "--" + key;
    for (char& ch : s)
        if (ch == '_') ch = '-';
    return s;
}

const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields = build_fields();
    return fields;
}

Kernel parse_kernel(std::string_view text) {
    if (text == "serial") return Kernel::Serial;
    if (text == "openmp") return Kernel::OpenMP;
    if (text == "auto") return Kernel::Auto;
    throw ConfigError("unknown kernel '" + std::string(text) + "' (serial, openmp, auto)");
}

const char* to_string(Kernel kernel) {
    switch (kernel) {
        case Kernel::Serial: return "serial";
        case Kernel::OpenMP: return "openmp";
        case Kernel::Auto: return "auto";
    }
    return "?";
}

RunConfig parse_run_config(std::string_view text, std::string_view origin) {
    std::map<std::pair<std::string, std::string>, const ConfigField*> index;
    for (const auto& f : config_fields()) index[{f.section, f.key}] = &f;
    RunConfig cfg;
    for (const auto& kv : parse_key_values(text, origin)) {
        auto it = index.find({kv.section, kv.key});
        if (it == index.end())
            throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) + ": unknown key '" + kv.key +
                              "' in section [" + kv.section + "]");
        try {
            it->second->set(cfg, kv.value);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text_file(path), path); }

std::string render_run_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& sec : kConfigSections) {
        if (!out.empty()) out += "\n";
        out += "[" + std::string(sec.name) + "]\n";
        for (const auto& f : config_fields()) {
            if (f.section != sec.name) continue;
            if (f.key == "row_size" && !cfg.row_size) continue;
            out += f.key + " = " + f.get(cfg) + "\n";
        }
    }
    return out;
}

void require_valid(const RunConfig& cfg) {
    if (cfg.analysis != "tran") throw ConfigError("analysis '" + cfg.analysis + "' is not supported (only 'tran')");
    if (cfg.row_size && *cfg.row_size == 0) throw ConfigError("row_size must be at least 1");
    require_valid(cfg.timing);
    require_valid(cfg.volts);
    require_valid(cfg.sim);
    for (const auto& [name, s] : cfg.variation.sigma) {
        bool known = false;
        for (const auto& pf : kParamFields) known = known || name == pf.name;
        if (!known) throw ConfigError("variation names unknown parameter '" + name + "'");
        if (!(s >= 0.0)) throw ConfigError("sigma for " + name + " must be non-negative");
    }
}

ExecutionPlan apply_row_size(ExecutionPlan plan, const RunConfig& cfg) {
    if (!cfg.row_size) return plan;
    if (*cfg.row_size < plan.row_size)
        throw ConfigError("row_size " + std::to_string(*cfg.row_size) + " is smaller than the plan's " +
                          std::to_string(plan.row_size) + " devices");
    plan.row_size = *cfg.row_size;
    return plan;
}

std::vector<VteamParams> device_params(const VteamParams& nominal, const VariationSpec& variation, std::size_t n) {
    std::vector<VteamParams> out;
    out.reserve(n);
    for (std::size_t d = 0; d < n; ++d)
        out.push_back(variation.enabled() ? sample_varied_params(nominal, variation, d) : nominal);
    return out;
}

EmitConfig make_emit_config(const RunConfig& cfg, const std::string& output_dir) {
    EmitConfig e;
    e.output_dir = output_dir;
    e.model_include_path = cfg.model_include;
    e.switch_open_resistance = cfg.sim.switch_open_resistance;
    e.switch_closed_resistance = cfg.sim.switch_closed_resistance;
    e.tran_step = cfg.sim.dt;
    return e;
}

}  // namespace magicsim
