#include "magicsim/cli.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "magicsim/error.hpp"
#include "magicsim/fixtures.hpp"
#include "magicsim/keyvalue.hpp"

namespace fs = std::filesystem;

namespace magicsim {

namespace {

std::string pj(double joules) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", joules * 1e12);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir, ec.message());
}

struct Prepared {
    ExecutionPlan plan;
    VteamParams nominal;
    std::vector<VteamParams> per_device;
};

Prepared prepare(const std::string& plan_path, const RunConfig& cfg, std::ostream& err) {
    require_valid(cfg);
    Prepared p;
    p.plan = apply_row_size(load_plan(plan_path, err), cfg);
    p.nominal = load_params(cfg.params);
    p.per_device = device_params(p.nominal, cfg.variation, p.plan.row_size);
    return p;
}

std::string truth_table_text(const ExecutionPlan& plan, const ReferenceFn& ref, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    const std::size_t n = plan.inputs.size();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        std::vector<std::uint8_t> bits;
        std::string in;
        for (std::size_t k = 0; k < n; ++k) {
            bits.push_back(static_cast<std::uint8_t>((m >> (n - 1 - k)) & 1U));
            in += bits.back() ? '1' : '0';
        }
        std::string o;
        for (auto b : ref(bits)) o += b ? '1' : '0';
        out += in + " " + o + "\n";
    }
    return out;
}

std::string signal_list(const std::vector<SignalRef>& refs) {
    std::string s;
    for (const auto& r : refs) s += (s.empty() ? "" : " ") + r.name;
    return s;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const GrammarError*>(&e) ||
        dynamic_cast<const SchemaError*>(&e))
        return kExitParse;
    if (dynamic_cast<const PlanError*>(&e)) return kExitValidate;
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const SimError*>(&e) || dynamic_cast<const EmulationError*>(&e)) return kExitSim;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    return kExitUsage;
}

const char* stage_for(const std::exception& e) {
    switch (exit_code_for(e)) {
        case kExitParse: return "parse";
        case kExitValidate: return "validate";
        case kExitConfig: return "config";
        case kExitSim: return "sim";
        case kExitIo: return "io";
        default: return "error";
    }
}

std::string plan_name_from_path(const std::string& path) { return fs::path(path).stem().string(); }

ExecutionPlan load_plan(const std::string& path, std::ostream& warn) {
    ExecutionPlan plan = parse_plan(read_text_file(path));
    std::string fatal;
    ViolationKind first = ViolationKind::CountMismatch;
    for (const auto& v : validate_plan(plan)) {
        const std::string line = v.cycle_label + ": " + to_string(v.kind) + ": " + v.detail;
        if (v.kind == ViolationKind::CountMismatch) {
            warn << "warning: " << path << ": " << line << "\n";
            continue;
        }
        if (fatal.empty()) first = v.kind;
        fatal += (fatal.empty() ? "" : "; ") + line;
    }
    if (!fatal.empty()) throw PlanError(first, path + ": " + fatal);
    return plan;
}

Manifest cmd_gen(const std::string& plan_path, const RunConfig& cfg, const std::string& pattern,
                 const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const Prepared p = prepare(plan_path, cfg, err);
    const InputPattern pat = parse_pattern(pattern, p.plan.inputs.size());
    const Schedule s = build_schedule(p.plan, pat, cfg.timing, cfg.volts);
    const auto assignments = make_variation_assignments(p.per_device, cfg.variation);
    Manifest m = emit_tree(p.plan, pat, s, p.nominal, make_emit_config(cfg, out_dir), assignments);
    for (const auto& f : m.files) out << join_path(m.root, f) << "\n";
    return m;
}

std::vector<SimOutcome> cmd_sim(const std::string& plan_path, const RunConfig& cfg,
                                const std::vector<std::string>& patterns, const std::string& out_dir,
                                std::ostream& out, std::ostream& err) {
    const Prepared p = prepare(plan_path, cfg, err);
    std::vector<InputPattern> pats;
    for (const auto& text : patterns) pats.push_back(parse_pattern(text, p.plan.inputs.size()));
    const std::string plan_name = plan_name_from_path(plan_path);

    std::vector<SimOutcome> results(pats.size());
    std::vector<std::exception_ptr> failures(pats.size());
    const auto count = static_cast<long long>(pats.size());
#pragma omp parallel for schedule(dynamic) if (count > 1)
    for (long long k = 0; k < count; ++k) {
        try {
            const InputPattern& pat = pats[k];
            SimOutcome& r = results[k];
            r.pattern = pat.name;
            r.dir = pats.size() > 1 ? join_path(out_dir, pat.name) : out_dir;
            ensure_dir(r.dir);
            const Schedule s = build_schedule(p.plan, pat, cfg.timing, cfg.volts);
            SimRun run = integrate_energy(p.plan, s, p.per_device, cfg.sim);
            run.energy.plan_name = plan_name;
            run.energy.pattern_name = pat.name;
            run.energy.params_id = cfg.params;
            r.verification = verify_run(p.plan, pat, run.trace);
            r.pass = r.verification.pass;
            r.energy = run.energy;
            write_text_file(join_path(r.dir, "trace.csv"), trace_csv(run.trace));
            write_text_file(join_path(r.dir, "summary.json"), trace_summary_json(run.trace));
            write_text_file(join_path(r.dir, "energy.csv"), energy_csv(run.energy));
            write_text_file(join_path(r.dir, "energy.json"), energy_json(run.energy));
            write_text_file(join_path(r.dir, "cumulative_energy.csv"), cumulative_csv(run.cumulative));
            write_text_file(join_path(r.dir, "verification.json"), verification_json(r.verification, pat));
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    for (const auto& r : results) {
        out << r.pattern << ": " << (r.pass ? "pass" : "FAIL");
        for (const auto& c : r.verification.outputs)
            out << " " << c.name << "=" << (c.simulated ? 1 : 0) << (c.match ? "" : "(expected " + std::to_string(c.expected) + ")");
        out << "  energy " << pj(r.energy.grand_total) << " pJ (exec " << pj(r.energy.phase_total(PhaseKind::Exec))
            << ", init " << pj(r.energy.phase_total(PhaseKind::Init) + r.energy.phase_total(PhaseKind::Reinit))
            << ")  -> " << r.dir << "\n";
    }
    return results;
}

std::string cmd_energy_table(const std::vector<std::string>& plan_paths, const RunConfig& cfg, std::ostream& err) {
    static const char* kPatterns[] = {"I1", "I2", "I3"};
    std::string csv = "circuit,PI/PO,cycles,NOT,NOR,reinit";
    for (const char* pat : kPatterns) {
        const std::string p = pat;
        csv += "," + p + "_exec_pJ," + p + "_init_pJ," + p + "_total_pJ";
    }
    csv += "\n";
    for (const auto& path : plan_paths) {
        try {
            const Prepared p = prepare(path, cfg, err);
            const GateCounts c = count_ops(p.plan);
            std::string row = plan_name_from_path(path) + "," + std::to_string(p.plan.inputs.size()) + "/" +
                              std::to_string(p.plan.outputs.size()) + "," + std::to_string(p.plan.sequence.size()) + "," +
                              std::to_string(c.nots) + "," + std::to_string(c.nors) + "," + std::to_string(c.reinits);
            for (const char* name : kPatterns) {
                const InputPattern pat = parse_pattern(name, p.plan.inputs.size());
                const Schedule s = build_schedule(p.plan, pat, cfg.timing, cfg.volts);
                const SimRun run = integrate_energy(p.plan, s, p.per_device, cfg.sim);
                if (!verify_run(p.plan, pat, run.trace).pass)
                    err << "warning: " << path << ": pattern " << name << " failed verification\n";
                const auto& e = run.energy;
                row += "," + pj(e.phase_total(PhaseKind::Exec)) + "," +
                       pj(e.phase_total(PhaseKind::Init) + e.phase_total(PhaseKind::Reinit)) + "," + pj(e.grand_total);
            }
            csv += row + "\n";
        } catch (const std::exception& e) {
            err << path << ": " << stage_for(e) << ": " << e.what() << "\n";
        }
    }
    return csv;
}

CalibrationOutcome cmd_calibrate(const CalibrationTargets& targets, const RunConfig& cfg, const std::string& out_path,
                                 std::ostream& out) {
    CalibrationOutcome res;
    res.params = calibrate_params(targets);
    out << render_params(res.params);

    SweepOptions sweep;
    sweep.simulate = true;
    sweep.sim = cfg.sim;
    sweep.timing = cfg.timing;
    sweep.volts = cfg.volts;
    auto check = [&](const char* name, const ExecutionPlan& plan, ReferenceFn ref) {
        sweep.params.assign(plan.row_size, res.params);
        const SweepReport rep = truth_table_sweep(plan, ref, sweep);
        for (const auto& f : rep.failing_patterns) res.failures.push_back(std::string(name) + " " + f);
        out << name << " truth table: " << rep.passed << "/" << rep.tested << "\n";
    };
    check("NOT", fixtures::magic_not(), [](std::span<const std::uint8_t> in) {
        return std::vector<std::uint8_t>{static_cast<std::uint8_t>(!in[0])};
    });
    check("NOR", fixtures::magic_nor(), [](std::span<const std::uint8_t> in) {
        return std::vector<std::uint8_t>{static_cast<std::uint8_t>(!(in[0] || in[1]))};
    });
    res.truth_tables_pass = res.failures.empty();
    if (!out_path.empty()) {
        if (auto parent = fs::path(out_path).parent_path(); !parent.empty()) ensure_dir(parent.string());
        write_text_file(out_path, render_params(res.params));
        out << "wrote " << out_path << "\n";
    }
    return res;
}

std::vector<std::string> cmd_fixtures(const std::string& out_dir) {
    ensure_dir(out_dir);
    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::string& text) {
        write_text_file(join_path(out_dir, name), text);
        files.push_back(join_path(out_dir, name));
    };
    const ExecutionPlan ha = fixtures::half_adder();
    const ExecutionPlan c17 = fixtures::c17();
    put("half_adder.json", fixtures::half_adder_json());
    put("half_adder.tt", truth_table_text(ha, fixtures::half_adder_reference,
                                          signal_list(ha.inputs) + " -> " + signal_list(ha.outputs)));
    put("c17.json", fixtures::c17_json());
    put("c17.tt", truth_table_text(c17, fixtures::c17_reference,
                                   signal_list(c17.inputs) + " -> " + signal_list(c17.outputs)));
    return files;
}

namespace {

// `--config` must be applied before the flags so flags take precedence.
std::string find_config_arg(int argc, const char* const* argv) {
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--config" && k + 1 < argc) return argv[k + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    try {
        config_path = find_config_arg(argc, argv);
        if (!config_path.empty()) cfg = load_run_config(config_path);
    } catch (const std::exception& e) {
        err << stage_for(e) << ": " << e.what() << "\n";
        return exit_code_for(e);
    }

    CLI::App app{"Netlist generation and transient simulation for single-row MAGIC crossbars", "magicsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "magicsim 0.1.0");

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file; flags override its values");
        for (const auto& sec : kConfigSections) {
            for (const auto& f : config_fields()) {
                if (f.section != sec.name) continue;
                const ConfigField* field = &f;
                sub->add_option_function<std::string>(
                       f.flag(), [&cfg, field](const std::string& v) { field->set(cfg, v); }, f.help)
                    ->group(sec.group)
                    ->default_str(f.get(cfg));
            }
        }
    };

    std::string plan_path, pattern = "I1", out_dir;
    std::vector<std::string> sweep, plan_paths;

    auto* gen = app.add_subcommand("gen", "Emit the netlist, PWL sources and energy script for a plan");
    gen->add_option("mapping", plan_path, "Execution plan JSON")->required();
    gen->add_option("--pattern", pattern, "Input pattern: I1, I2, I3 or a bit string")->capture_default_str();
    gen->add_option("-o,--out", out_dir, "Output directory")->default_str("out");
    add_run_options(gen);

    auto* sim = app.add_subcommand("sim", "Simulate a plan and verify it against the logic model");
    sim->add_option("mapping", plan_path, "Execution plan JSON")->required();
    sim->add_option("--pattern", pattern, "Input pattern: I1, I2, I3 or a bit string")->capture_default_str();
    sim->add_option("--sweep-patterns", sweep, "Comma-separated patterns run in parallel")->delimiter(',');
    sim->add_option("-o,--out", out_dir, "Output directory")->default_str("sim_out");
    add_run_options(sim);

    auto* table = app.add_subcommand("energy-table", "Simulate plans on I1/I2/I3 and tabulate energy");
    std::string table_out;
    table->add_option("mappings", plan_paths, "Execution plan JSON files");
    table->add_option("-o,--out", table_out, "Write the CSV here instead of stdout");
    add_run_options(table);

    auto* cal = app.add_subcommand("calibrate", "Fit the switching coefficients and check NOT/NOR");
    CalibrationTargets targets;
    std::string preset_out = "presets/vteam_default.params";
    cal->add_option("--set-voltage", targets.set_voltage, "SET drive used for calibration (V)")
        ->capture_default_str()->group("Calibration targets");
    cal->add_option("--reset-voltage", targets.reset_voltage, "RESET drive used for calibration (V)")
        ->capture_default_str()->group("Calibration targets");
    cal->add_option("--settle-fraction", targets.settle_fraction, "Fraction of the pulse allowed for a full switch")
        ->capture_default_str()->group("Calibration targets");
    cal->add_option("-o,--out", preset_out, "Preset file to write")->capture_default_str();
    add_run_options(cal);

    auto* fix = app.add_subcommand("fixtures", "Write the bundled example plans and truth tables");
    std::string fixtures_out = "fixtures";
    fix->add_option("-o,--out", fixtures_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        err << stage_for(e) << ": " << e.what() << "\n";
        return exit_code_for(e);
    }

    try {
        if (gen->parsed()) {
            cmd_gen(plan_path, cfg, pattern, out_dir.empty() ? "out" : out_dir, out, err);
            return kExitOk;
        }
        if (sim->parsed()) {
            std::vector<std::string> pats = sweep.empty() ? std::vector<std::string>{pattern} : sweep;
            const auto results = cmd_sim(plan_path, cfg, pats, out_dir.empty() ? "sim_out" : out_dir, out, err);
            for (const auto& r : results)
                if (!r.pass) return kExitVerify;
            return kExitOk;
        }
        if (table->parsed()) {
            const std::string csv = cmd_energy_table(plan_paths, cfg, err);
            if (table_out.empty()) out << csv;
            else write_text_file(table_out, csv);
            return kExitOk;
        }
        if (cal->parsed()) {
            targets.v_set = load_params(cfg.params).v_set;
            targets.v_reset = load_params(cfg.params).v_reset;
            return cmd_calibrate(targets, cfg, preset_out, out).truth_tables_pass ? kExitOk : kExitVerify;
        }
        if (fix->parsed()) {
            for (const auto& f : cmd_fixtures(fixtures_out)) out << f << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << stage_for(e) << ": " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kExitUsage;
}

}  // namespace magicsim
