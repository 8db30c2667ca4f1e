#include "magicsim/oracle.hpp"

#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace magicsim {

Emulation emulate(const ExecutionPlan& plan, const InputPattern& pattern, bool keep_log) {
    if (pattern.bits.size() != plan.inputs.size())
        throw EmulationError("pattern has " + std::to_string(pattern.bits.size()) + " bits for " +
                             std::to_string(plan.inputs.size()) + " inputs");
    Emulation em;
    auto& bits = em.final.bits;
    bits.assign(plan.row_size, std::nullopt);
    // Devices holding a value a gate may consume: inputs and gate results.
    std::vector<bool> readable(plan.row_size, false);
    std::vector<bool> armed(plan.row_size, false);
    std::vector<bool> is_input(plan.row_size, false);

    auto check = [&](std::size_t d, const std::string& label) {
        if (d >= plan.row_size) throw EmulationError(label + ": device " + std::to_string(d) + " is outside the row");
    };
    for (std::size_t k = 0; k < plan.inputs.size(); ++k) {
        const std::size_t d = plan.inputs[k].device;
        check(d, "Inputs");
        bits[d] = pattern.bits[k] != 0;
        readable[d] = true;
        is_input[d] = true;
    }

    auto read = [&](const SignalRef& r, const std::string& label) {
        check(r.device, label);
        if (!readable[r.device] || !bits[r.device])
            throw EmulationError(label + ": operand '" + r.name + "' on device " + std::to_string(r.device) + " is undefined");
        return *bits[r.device];
    };
    auto write = [&](const SignalRef& r, bool value, const std::string& label) {
        check(r.device, label);
        if (is_input[r.device]) throw EmulationError(label + ": gate writes plan input device " + std::to_string(r.device));
        if (!armed[r.device])
            throw EmulationError(label + ": output device " + std::to_string(r.device) + " was not initialized");
        // MAGIC can only pull an initialized 1 down to 0.
        bits[r.device] = value;
        readable[r.device] = true;
        armed[r.device] = false;
    };

    for (const auto& entry : plan.sequence) {
        if (const auto* init = std::get_if<InitOp>(&entry.op)) {
            for (const auto& t : init->targets) {
                check(t.device, entry.label);
                if (is_input[t.device]) throw EmulationError(entry.label + ": Init overwrites plan input device " + std::to_string(t.device));
                bits[t.device] = true;
                readable[t.device] = false;
                armed[t.device] = true;
            }
        } else if (const auto* n = std::get_if<NotOp>(&entry.op)) {
            if (n->input.device == n->output.device) throw EmulationError(entry.label + ": operand is the output");
            write(n->output, !read(n->input, entry.label), entry.label);
        } else {
            const auto& g = std::get<NorOp>(entry.op);
            if (g.input_a.device == g.output.device || g.input_b.device == g.output.device)
                throw EmulationError(entry.label + ": operand is the output");
            const bool a = read(g.input_a, entry.label);
            const bool b = read(g.input_b, entry.label);
            write(g.output, !(a || b), entry.label);
        }
        if (keep_log) em.per_cycle.push_back(em.final);
    }

    for (std::size_t k = 0; k < plan.inputs.size(); ++k) {
        if (bits[plan.inputs[k].device] != (pattern.bits[k] != 0))
            throw EmulationError("input device " + std::to_string(plan.inputs[k].device) + " changed during emulation");
    }
    return em;
}

std::vector<std::uint8_t> expected_outputs(const ExecutionPlan& plan, const InputPattern& pattern) {
    const Emulation em = emulate(plan, pattern);
    std::vector<std::uint8_t> out;
    for (const auto& o : plan.outputs) {
        const auto& b = em.final.bits[o.device];
        if (!b) throw EmulationError("output '" + o.name + "' is undefined after the sequence");
        out.push_back(*b ? 1 : 0);
    }
    return out;
}

VerificationReport verify_run(const ExecutionPlan& plan, const InputPattern& pattern, const SimTrace& trace) {
    VerificationReport rep;
    const auto expected = expected_outputs(plan, pattern);
    const auto sensed = read_states(trace);
    for (std::size_t k = 0; k < plan.outputs.size(); ++k) {
        const auto& o = plan.outputs[k];
        OutputCheck c{o.name, o.device, expected[k] != 0, trace.final_states.at(o.device) != 0, sensed.at(o.device) != 0, false};
        c.match = c.simulated == c.expected && c.sensed == c.expected;
        rep.pass = rep.pass && c.match;
        rep.outputs.push_back(c);
    }
    return rep;
}

std::string verification_json(const VerificationReport& report, const InputPattern& pattern) {
    nlohmann::ordered_json j;
    j["pattern"] = pattern.name;
    j["bits"] = pattern_bits(pattern);
    j["pass"] = report.pass;
    auto outs = nlohmann::ordered_json::array();
    for (const auto& c : report.outputs) {
        outs.push_back({{"name", c.name}, {"device", c.device}, {"expected", c.expected ? 1 : 0},
                        {"simulated", c.simulated ? 1 : 0}, {"sensed", c.sensed ? 1 : 0}, {"match", c.match}});
    }
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

ReferenceFn parse_truth_table(std::string_view text) {
    std::map<std::string, std::vector<std::uint8_t>> table;
    std::istringstream ss{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (auto c = line.find('#'); c != std::string::npos) line.resize(c);
        std::istringstream ls(line);
        std::string in, out;
        if (!(ls >> in)) continue;
        if (!(ls >> out)) throw SchemaError("truth table line " + std::to_string(line_no) + ": expected 'inputbits outputbits'");
        std::vector<std::uint8_t> bits;
        for (char ch : in + out)
            if (ch != '0' && ch != '1') throw SchemaError("truth table line " + std::to_string(line_no) + ": non-binary digit");
        for (char ch : out) bits.push_back(ch == '1' ? 1 : 0);
        table[in] = std::move(bits);
    }
    return [table = std::move(table)](std::span<const std::uint8_t> in) {
        std::string key;
        for (auto b : in) key += b ? '1' : '0';
        auto it = table.find(key);
        if (it == table.end()) throw SchemaError("truth table has no row for inputs " + key);
        return it->second;
    };
}

SweepReport truth_table_sweep(const ExecutionPlan& plan, const ReferenceFn& reference, const SweepOptions& opts) {
    const std::size_t pi = plan.inputs.size();
    std::vector<InputPattern> patterns;
    SweepReport rep;
    if (pi <= opts.max_exhaustive_inputs) {
        rep.exhaustive = true;
        const std::uint64_t count = std::uint64_t{1} << pi;
        for (std::uint64_t m = 0; m < count; ++m) {
            InputPattern p;
            for (std::size_t k = 0; k < pi; ++k) p.bits.push_back(static_cast<std::uint8_t>((m >> (pi - 1 - k)) & 1U));
            p.name = pattern_bits(p);
            patterns.push_back(std::move(p));
        }
    } else {
        std::mt19937_64 rng(opts.seed);
        std::bernoulli_distribution coin(0.5);
        for (std::size_t s = 0; s < opts.random_samples; ++s) {
            InputPattern p;
            for (std::size_t k = 0; k < pi; ++k) p.bits.push_back(coin(rng) ? 1 : 0);
            p.name = pattern_bits(p);
            patterns.push_back(std::move(p));
        }
    }

    std::vector<std::uint8_t> ok(patterns.size(), 0);
    const auto count = static_cast<long long>(patterns.size());
#pragma omp parallel for schedule(dynamic) if (opts.simulate)
    for (long long m = 0; m < count; ++m) {
        const InputPattern& p = patterns[m];
        try {
            const auto want = reference(p.bits);
            bool good = expected_outputs(plan, p) == want;
            if (good && opts.simulate) {
                SimOptions so = opts.sim;
                so.kernel = Kernel::Serial;
                const Schedule s = build_schedule(plan, p, opts.timing, opts.volts);
                const SimTrace trace = run_transient(plan, s, opts.params, so);
                good = verify_run(plan, p, trace).pass;
            }
            ok[m] = good ? 1 : 0;
        } catch (const std::exception&) {
            ok[m] = 0;
        }
    }
    for (std::size_t m = 0; m < patterns.size(); ++m) {
        ++rep.tested;
        if (ok[m]) ++rep.passed;
        else rep.failing_patterns.push_back(patterns[m].name);
    }
    return rep;
}

}  // namespace magicsim
