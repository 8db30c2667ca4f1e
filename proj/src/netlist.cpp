#include "magicsim/netlist.hpp"

#include <filesystem>
#include <map>
#include <sstream>

#include "magicsim/error.hpp"
#include "magicsim/format.hpp"
#include "magicsim/keyvalue.hpp"

namespace magicsim {

namespace fs = std::filesystem;

namespace {

std::string col(std::size_t i) { return "c" + std::to_string(i); }

// Nets inside the first "( ... )" group of a line.
std::vector<std::string> paren_nets(const std::string& line) {
    std::vector<std::string> nets;
    auto open = line.find('(');
    auto close = line.find(')', open);
    if (open == std::string::npos || close == std::string::npos) return nets;
    std::istringstream ss(line.substr(open + 1, close - open - 1));
    std::string net;
    while (ss >> net) nets.push_back(net);
    return nets;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

std::vector<VariationAssignment> make_variation_assignments(std::span<const VteamParams> per_device,
                                                            const VariationSpec& spec) {
    std::vector<VariationAssignment> out;
    if (!spec.enabled()) return out;
    for (std::size_t d = 0; d < per_device.size(); ++d) {
        for (const auto& f : kParamFields) {
            auto it = spec.sigma.find(f.name);
            if (it == spec.sigma.end() || it->second == 0.0) continue;
            out.push_back({d, f.name, per_device[d].*f.member});
        }
    }
    return out;
}

std::string emit_crossbar_subckt(std::size_t n_columns, const VteamParams& params, const EmitConfig& config,
                                 std::span<const VariationAssignment> assignments) {
    std::map<std::pair<std::size_t, std::string>, const VariationAssignment*> varied;
    for (const auto& a : assignments) varied[{a.device, a.field}] = &a;

    std::string out = "// Connect memristors together in crossbar\n";
    out += "subckt " + config.subckt_name + " r0";
    for (std::size_t i = 0; i < n_columns; ++i) out += " " + col(i);
    out += "\n";
    for (std::size_t i = 0; i < n_columns; ++i) {
        const std::string idx = std::to_string(i);
        out += "I" + idx + " (r0 " + col(i) + " n" + idx + ") VTEAM_model";
        for (const auto& f : kParamFields) {
            out += " ";
            out += f.name;
            out += "=";
            auto it = varied.find({i, f.name});
            out += it != varied.end() ? it->second->param_name() : spice_number(params.*f.member);
        }
        out += "\n";
    }
    out += "ends " + config.subckt_name + "\n";
    out += "// call sub circuit for peripherals\n";
    out += config.instance_prefix + " (sub0_r0";
    for (std::size_t i = 0; i < n_columns; ++i) out += " sub0_" + col(i);
    out += ") " + config.subckt_name + "\n";
    return out;
}

std::string emit_switches(std::size_t n_columns, const EmitConfig& config) {
    const std::string relay = " relay ropen=" + scaled_number(config.switch_open_resistance) +
                              " rclosed=" + scaled_number(config.switch_closed_resistance) + "\n";
    std::string out = "// Relay for modelling transistor as switch\n";
    out += "W0 (0 sub0_r0 v_r0 0)" + relay;
    for (std::size_t i = 0; i < n_columns; ++i) {
        const std::string idx = std::to_string(i);
        out += "W" + std::to_string(i + 1) + " (v_c" + idx + " sub0_c" + idx + " v_s" + idx + " 0)" + relay;
    }
    return out;
}

std::string emit_sources(std::size_t n_columns, const std::string& pwl_dir, const EmitConfig&) {
    std::string out = "// Create voltage source with PWL file path\n";
    std::size_t v = 0;
    auto line = [&](const std::string& pin) {
        out += "V" + std::to_string(v++) + " (v_" + pin + " 0) vsource type=pwl file = \"" + pwl_dir + "/" + pin +
               ".txt\"\n";
    };
    line("r0");
    for (std::size_t i = 0; i < n_columns; ++i) line("c" + std::to_string(i));
    for (std::size_t i = 0; i < n_columns; ++i) line("s" + std::to_string(i));
    return out;
}

std::string emit_sim_params(const Schedule& schedule, const InputPattern& pattern,
                            std::span<const VariationAssignment> assignments, const EmitConfig& config) {
    std::string out = "// include memristor verilog model\n";
    out += "ahdl_include \"" + config.model_include_path + "\"\n";
    std::string params;
    for (std::size_t k = 0; k < pattern.bits.size(); ++k)
        params += " in" + std::to_string(k) + "=" + spice_number(pattern.bits[k] ? schedule.volts.v_input : 0.0);
    for (const auto& a : assignments) params += " " + a.param_name() + "=" + spice_number(a.value);
    if (!params.empty()) out += "parameters" + params + "\n";
    out += "// save the current for further analysis\n";
    for (std::size_t i = 0; i < schedule.n_columns; ++i)
        out += "save " + config.instance_prefix + ".I" + std::to_string(i) + ":n\n";
    const std::string step = spice_number(config.tran_step);
    out += "tran tran stop=" + spice_number(schedule.total_time) + " step=" + step + " maxstep=" + step + "\n";
    return out;
}

std::string emit_energy_ocn(std::size_t n_columns, const Schedule& schedule, const EmitConfig& config) {
    const std::string stop = spice_number(schedule.total_time);
    std::string out;
    out += "; Energy per memristor: time integral of terminal voltage times device current\n";
    out += "openResults(\"./psf\")\n";
    out += "selectResult('tran)\n";
    for (std::size_t i = 0; i < n_columns; ++i) {
        const std::string idx = std::to_string(i);
        out += "E" + idx + " = integ((VT(\"/sub0_c" + idx + "\") - VT(\"/sub0_r0\")) * IT(\"/" + config.instance_prefix +
               "/I" + idx + "/n\") 0 " + stop + ")\n";
    }
    out += "Etotal = ";
    for (std::size_t i = 0; i < n_columns; ++i) {
        if (i) out += " + ";
        out += "E" + std::to_string(i);
    }
    out += "\n";
    for (std::size_t i = 0; i < n_columns; ++i) {
        const std::string idx = std::to_string(i);
        out += "printf(\"E" + idx + " = %e J\\n\" E" + idx + ")\n";
    }
    out += "printf(\"Etotal = %e J\\n\" Etotal)\n";
    return out;
}

std::string emit_main(const EmitConfig&) {
    return "// Testbench top level\n"
           "simulator lang=spectre\n"
           "global 0\n"
           "include \"simparams.scs\"\n"
           "include \"crossbar.scs\"\n"
           "include \"switches.scs\"\n"
           "include \"sources.scs\"\n";
}

std::vector<std::string> lint_netlist(const std::string& crossbar, const std::string& switches,
                                      const std::string& sources) {
    std::map<std::string, int> defined;
    for (const auto& line : lines_of(crossbar)) {
        // Only the subckt call binds top-level nets.
        if (line.rfind("//", 0) == 0 || line.rfind("subckt", 0) == 0 || line.rfind("ends", 0) == 0) continue;
        if (!line.empty() && line[0] == 'I') continue;
        for (const auto& net : paren_nets(line)) ++defined[net];
    }
    for (const auto& line : lines_of(sources)) {
        if (line.empty() || line[0] != 'V') continue;
        auto nets = paren_nets(line);
        if (!nets.empty()) ++defined[nets.front()];
    }
    std::vector<std::string> issues;
    for (const auto& line : lines_of(switches)) {
        if (line.empty() || line[0] != 'W') continue;
        for (const auto& net : paren_nets(line)) {
            if (net == "0") continue;
            auto it = defined.find(net);
            if (it == defined.end()) issues.push_back("net '" + net + "' in switches is never defined");
            else if (it->second != 1)
                issues.push_back("net '" + net + "' is defined " + std::to_string(it->second) + " times");
        }
    }
    for (const auto& [net, count] : defined) {
        if (count != 1) issues.push_back("net '" + net + "' is defined " + std::to_string(count) + " times");
    }
    return issues;
}

Manifest emit_tree(const ExecutionPlan& plan, const InputPattern& pattern, const Schedule& schedule,
                   const VteamParams& params, const EmitConfig& config,
                   std::span<const VariationAssignment> assignments) {
    if (schedule.n_columns != plan.row_size)
        throw ConfigError("schedule has " + std::to_string(schedule.n_columns) + " columns, plan row size is " +
                          std::to_string(plan.row_size));
    const std::size_t n = plan.row_size;
    const std::string crossbar = emit_crossbar_subckt(n, params, config, assignments);
    const std::string switches = emit_switches(n, config);
    const std::string sources = emit_sources(n, config.pwl_dir, config);
    if (auto issues = lint_netlist(crossbar, switches, sources); !issues.empty())
        throw Error("netlist lint failed: " + issues.front());

    Manifest m;
    m.root = config.output_dir;
    const fs::path root(config.output_dir);
    std::error_code ec;
    fs::create_directories(root / "pwl", ec);
    if (ec) throw IoError((root / "pwl").string(), ec.message());

    auto put = [&](const std::string& rel, const std::string& text) {
        write_text_file((root / rel).string(), text);
        m.files.push_back(rel);
    };
    put("crossbar.scs", crossbar);
    put("switches.scs", switches);
    put("sources.scs", sources);
    put("simparams.scs", emit_sim_params(schedule, pattern, assignments, config));
    put("energy.ocn", emit_energy_ocn(n, schedule, config));
    put("main.scs", emit_main(config));
    put("pwl/r0.txt", render_pwl(schedule.row_ground_switch_waveform));
    for (std::size_t i = 0; i < n; ++i) put("pwl/c" + std::to_string(i) + ".txt", render_pwl(schedule.column_waveforms[i]));
    for (std::size_t i = 0; i < n; ++i)
        put("pwl/s" + std::to_string(i) + ".txt", render_pwl(schedule.column_switch_waveforms[i]));
    return m;
}

}  // namespace magicsim
