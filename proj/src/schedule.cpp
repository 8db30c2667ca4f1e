#include "magicsim/schedule.hpp"

#include <algorithm>
#include <variant>

#include "magicsim/error.hpp"
#include "magicsim/format.hpp"

namespace magicsim {

void require_valid(const TimingConfig& t) {
    if (!(t.pulse_width > 0.0 && t.rise > 0.0 && t.fall > 0.0))
        throw ConfigError("pulse width, rise and fall times must be positive");
    if (!(t.gap >= 0.0)) throw ConfigError("inter-cycle gap must be non-negative");
}

void require_valid(const VoltageConfig& v) {
    if (!(v.v_read < v.v_op && v.v_op < v.v_init))
        throw ConfigError("voltages must satisfy v_read < v_op < v_init");
    if (!(v.v_switch_on > v.v_switch_off)) throw ConfigError("switch-on voltage must exceed switch-off voltage");
}

double Waveform::value_at(double t) const {
    if (points.empty()) return 0.0;
    if (t <= points.front().t) return points.front().v;
    if (t >= points.back().t) return points.back().v;
    auto it = std::upper_bound(points.begin(), points.end(), t,
                               [](double x, const WavePoint& p) { return x < p.t; });
    const WavePoint& b = *it;
    const WavePoint& a = *(it - 1);
    return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
}

double WaveformCursor::at(double t) {
    const auto& pts = w_->points;
    if (pts.empty()) return 0.0;
    while (seg_ + 1 < pts.size() && pts[seg_ + 1].t <= t) ++seg_;
    if (seg_ + 1 >= pts.size() || t <= pts[seg_].t) return pts[seg_].v;
    const WavePoint& a = pts[seg_];
    const WavePoint& b = pts[seg_ + 1];
    if (a.v == b.v) return a.v;
    return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
}

WaveformBuilder::WaveformBuilder(const TimingConfig& timing, double base) : timing_(timing), base_(base) {
    wave_.points.push_back({0.0, base});
}

void WaveformBuilder::append(double t, double v) {
    auto& pts = wave_.points;
    if (!pts.empty() && t <= pts.back().t) {
        // Join of adjacent pulses: the waveform already sits at this level.
        if (v == pts.back().v) return;
        throw ConfigError("waveform points out of order at t=" + spice_number(t));
    }
    pts.push_back({t, v});
}

WaveformBuilder& WaveformBuilder::pulse(double t0, double level) {
    if (level == base_) return *this;
    const double t1 = t0 + timing_.rise;
    const double t2 = t1 + timing_.pulse_width;
    const double t3 = t2 + timing_.fall;
    append(t0, base_);
    append(t1, level);
    append(t2, level);
    append(t3, base_);
    return *this;
}

Waveform WaveformBuilder::finish(double total_time) {
    if (wave_.points.back().t < total_time) wave_.points.push_back({total_time, wave_.points.back().v});
    return wave_;
}

Waveform WaveformBuilder::finish() { return wave_; }

const char* to_string(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::Load: return "load";
        case PhaseKind::Init: return "init";
        case PhaseKind::Reinit: return "reinit";
        case PhaseKind::Exec: return "exec";
        case PhaseKind::Read: return "read";
    }
    return "?";
}

InputPattern make_pattern(PatternKind kind, std::size_t n_inputs) {
    InputPattern p;
    p.bits.resize(n_inputs);
    for (std::size_t i = 0; i < n_inputs; ++i) {
        switch (kind) {
            case PatternKind::AllZeros: p.bits[i] = 0; break;
            case PatternKind::AllOnes: p.bits[i] = 1; break;
            case PatternKind::Alternating: p.bits[i] = (i % 2 == 0) ? 1 : 0; break;
        }
    }
    p.name = kind == PatternKind::AllZeros ? "I1" : kind == PatternKind::AllOnes ? "I2" : "I3";
    return p;
}

InputPattern parse_pattern(std::string_view text, std::size_t n_inputs) {
    if (text == "I1") return make_pattern(PatternKind::AllZeros, n_inputs);
    if (text == "I2") return make_pattern(PatternKind::AllOnes, n_inputs);
    if (text == "I3") return make_pattern(PatternKind::Alternating, n_inputs);
    InputPattern p;
    for (char c : text) {
        if (c != '0' && c != '1') throw ConfigError("pattern '" + std::string(text) + "' is neither I1/I2/I3 nor a bit string");
        p.bits.push_back(c == '1' ? 1 : 0);
    }
    if (p.bits.size() != n_inputs)
        throw ConfigError("pattern '" + std::string(text) + "' has " + std::to_string(p.bits.size()) +
                          " bits but the plan has " + std::to_string(n_inputs) + " inputs");
    p.name = std::string(text);
    return p;
}

std::string pattern_bits(const InputPattern& p) {
    std::string s;
    for (auto b : p.bits) s += b ? '1' : '0';
    return s;
}

Schedule build_schedule(const ExecutionPlan& plan, const InputPattern& pattern, const TimingConfig& timing,
                        const VoltageConfig& volts) {
    require_valid(timing);
    require_valid(volts);
    if (pattern.bits.size() != plan.inputs.size())
        throw ConfigError("input pattern has " + std::to_string(pattern.bits.size()) + " bits, plan has " +
                          std::to_string(plan.inputs.size()) + " inputs");
    for (const auto& v : validate_plan(plan)) {
        if (v.kind != ViolationKind::CountMismatch)
            throw ConfigError("cannot schedule an invalid plan: " + v.cycle_label + ": " + to_string(v.kind) + ": " + v.detail);
    }

    const std::size_t n = plan.row_size;
    const double period = timing.cycle_period();
    const std::size_t cycles = 1 + plan.sequence.size() + n;

    Schedule s;
    s.n_columns = n;
    s.timing = timing;
    s.volts = volts;
    s.total_time = static_cast<double>(cycles) * period;

    std::vector<WaveformBuilder> col(n, WaveformBuilder(timing, 0.0));
    std::vector<WaveformBuilder> sw(n, WaveformBuilder(timing, volts.v_switch_off));
    WaveformBuilder row(timing, volts.v_switch_off);

    std::size_t cycle = 0;
    auto open_phase = [&](PhaseKind kind, std::string label) -> PhaseWindow& {
        const double t0 = static_cast<double>(cycle) * period;
        s.phases.push_back({kind, cycle, t0, static_cast<double>(cycle + 1) * period, {}, std::move(label)});
        return s.phases.back();
    };
    auto cycle_start = [&] { return static_cast<double>(cycle) * period; };

    // Load: every input holding a 1 is SET in parallel with the row grounded.
    {
        PhaseWindow& ph = open_phase(PhaseKind::Load, "load");
        for (std::size_t k = 0; k < plan.inputs.size(); ++k) {
            if (!pattern.bits[k]) continue;
            const std::size_t d = plan.inputs[k].device;
            col[d].pulse(cycle_start(), volts.v_input);
            sw[d].pulse(cycle_start(), volts.v_switch_on);
            ph.touched_devices.push_back(d);
        }
        row.pulse(cycle_start(), volts.v_switch_on);
        ++cycle;
    }

    for (std::size_t k = 0; k < plan.sequence.size(); ++k) {
        const auto& entry = plan.sequence[k];
        const double t0 = cycle_start();
        if (const auto* init = std::get_if<InitOp>(&entry.op)) {
            PhaseWindow& ph = open_phase(k == 0 ? PhaseKind::Init : PhaseKind::Reinit, entry.label);
            for (const auto& target : init->targets) {
                col[target.device].pulse(t0, volts.v_init);
                sw[target.device].pulse(t0, volts.v_switch_on);
                ph.touched_devices.push_back(target.device);
            }
            row.pulse(t0, volts.v_switch_on);
        } else {
            PhaseWindow& ph = open_phase(PhaseKind::Exec, entry.label);
            std::vector<std::size_t> operands = op_operands(entry.op);
            const std::size_t out = op_devices(entry.op).back();
            std::sort(operands.begin(), operands.end());
            operands.erase(std::unique(operands.begin(), operands.end()), operands.end());
            for (std::size_t d : operands) {
                col[d].pulse(t0, volts.v_op);
                sw[d].pulse(t0, volts.v_switch_on);
                ph.touched_devices.push_back(d);
            }
            // Output column is held at 0 V through its closed switch; the row floats.
            sw[out].pulse(t0, volts.v_switch_on);
            ph.touched_devices.push_back(out);
        }
        ++cycle;
    }

    for (std::size_t d = 0; d < n; ++d) {
        PhaseWindow& ph = open_phase(PhaseKind::Read, "read" + std::to_string(d));
        col[d].pulse(cycle_start(), volts.v_read);
        sw[d].pulse(cycle_start(), volts.v_switch_on);
        row.pulse(cycle_start(), volts.v_switch_on);
        ph.touched_devices.push_back(d);
        ++cycle;
    }
    // The last window ends exactly at total_time.
    s.phases.back().t_end = s.total_time;

    s.column_waveforms.reserve(n);
    s.column_switch_waveforms.reserve(n);
    for (std::size_t d = 0; d < n; ++d) {
        s.column_waveforms.push_back(col[d].finish(s.total_time));
        s.column_switch_waveforms.push_back(sw[d].finish(s.total_time));
    }
    s.row_ground_switch_waveform = row.finish(s.total_time);
    return s;
}

std::string render_pwl(const Waveform& waveform) {
    std::string out;
    out.reserve(waveform.points.size() * 24);
    for (const auto& p : waveform.points) {
        out += pwl_number(p.t);
        out += ' ';
        out += pwl_number(p.v);
        out += '\n';
    }
    return out;
}

}  // namespace magicsim
