#include "magicsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "magicsim/error.hpp"
#include "magicsim/kernels.hpp"

namespace magicsim {

namespace {

using kernels::kBlockSize;
using kernels::RowSums;
using kernels::RowSystem;

struct BlockSums {
    double current = 0.0;
    double abs_current = 0.0;
};

// Structure-of-arrays state for one run. Every per-device method touches
// only indices [lo, hi), so disjoint ranges may run concurrently.
class RowEngine {
public:
    RowEngine(const Schedule& schedule, std::span<const VteamParams> params, const SimOptions& opts)
        : n_(schedule.n_columns), params_(params), opts_(opts), row_cursor_(schedule.row_ground_switch_waveform) {
        g_closed_ = 1.0 / opts.switch_closed_resistance;
        g_open_ = 1.0 / opts.switch_open_resistance;
        col_cursor_.reserve(n_);
        sw_cursor_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            col_cursor_.emplace_back(schedule.column_waveforms[i]);
            sw_cursor_.emplace_back(schedule.column_switch_waveforms[i]);
        }
        w_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) w_[i] = params[i].w_min;
        for (auto* v : {&g_dev_, &g_sw_, &drive_, &g_ser_, &cur_, &volt_, &sw_pow_, &src_pow_}) v->assign(n_, 0.0);
    }

    RowSystem system() const { return RowSystem{g_dev_, g_sw_, drive_, g_row_}; }

    RowSums stage_assemble(std::size_t lo, std::size_t hi, double t) {
        for (std::size_t i = lo; i < hi; ++i) {
            drive_[i] = col_cursor_[i].at(t);
            g_sw_[i] = sw_cursor_[i].at(t) > opts_.switch_control_threshold ? g_closed_ : g_open_;
            g_dev_[i] = 1.0 / resistance(MemristorState{w_[i]}, params_[i]);
        }
        return kernels::assemble_range(system(), g_ser_, lo, hi);
    }

    void set_row(double t) {
        g_row_ = row_cursor_.at(t) > opts_.switch_control_threshold ? g_closed_ : g_open_;
    }

    BlockSums stage_advance(std::size_t lo, std::size_t hi, double v_row, double dt, double* rec_w, double* rec_v,
                            double* rec_i) {
        kernels::currents_range(system(), g_ser_, v_row, cur_, volt_, lo, hi);
        BlockSums s;
        for (std::size_t i = lo; i < hi; ++i) {
            const double c = cur_[i];
            s.current += c;
            s.abs_current += std::fabs(c);
            sw_pow_[i] = c * c / g_sw_[i];
            src_pow_[i] = drive_[i] * c;
            if (rec_w) {
                rec_w[i] = w_[i];
                rec_v[i] = volt_[i];
                rec_i[i] = c;
            }
            w_[i] = step_state(MemristorState{w_[i]}, volt_[i], dt, params_[i]).w;
        }
        return s;
    }

    std::size_t size() const { return n_; }
    double g_row() const { return g_row_; }
    const std::vector<double>& w() const { return w_; }
    const std::vector<double>& current() const { return cur_; }
    const std::vector<double>& voltage() const { return volt_; }
    const std::vector<double>& switch_power() const { return sw_pow_; }
    const std::vector<double>& source_power() const { return src_pow_; }

private:
    std::size_t n_;
    std::span<const VteamParams> params_;
    SimOptions opts_;
    double g_closed_ = 1.0;
    double g_open_ = 1e-12;
    double g_row_ = 0.0;
    WaveformCursor row_cursor_;
    std::vector<WaveformCursor> col_cursor_;
    std::vector<WaveformCursor> sw_cursor_;
    std::vector<double> w_, g_dev_, g_sw_, drive_, g_ser_, cur_, volt_, sw_pow_, src_pow_;
};

// Per-step work that is not data-parallel: phase tracking, read sensing,
// conservation check and the observer callback.
class StepBook {
public:
    StepBook(const Schedule& schedule, std::span<const VteamParams> params, SimTrace& trace, StepObserver* observer)
        : schedule_(schedule), params_(params), trace_(trace), observer_(observer) {}

    void after_step(std::size_t step, double t, double dt, double v_row, double g_row, BlockSums sums,
                    const RowEngine& eng) {
        const auto& phases = schedule_.phases;
        while (phase_ + 1 < phases.size() && t >= phases[phase_].t_end) ++phase_;
        const PhaseWindow& ph = phases[phase_];

        const double row_current = v_row * g_row;
        const double scale = sums.abs_current + std::fabs(row_current);
        if (scale > 0.0) {
            const double r = std::fabs(sums.current - row_current) / scale;
            trace_.max_kcl_residual = std::max(trace_.max_kcl_residual, r);
        }

        if (ph.kind == PhaseKind::Read && measured_phase_ != phase_ &&
            t >= 0.5 * (ph.t_start + ph.t_end) && !ph.touched_devices.empty()) {
            const std::size_t d = ph.touched_devices.front();
            const VteamParams& p = params_[d];
            trace_.reads.push_back({d, t, eng.voltage()[d], eng.current()[d],
                                    schedule_.volts.v_read / logic_threshold_resistance(p)});
            measured_phase_ = phase_;
        }

        if (observer_) {
            observer_->on_step(StepView{step, t, dt, phase_, eng.voltage(), eng.current(), eng.switch_power(),
                                        eng.source_power(), v_row * v_row * g_row});
        }
    }

private:
    const Schedule& schedule_;
    std::span<const VteamParams> params_;
    SimTrace& trace_;
    StepObserver* observer_;
    std::size_t phase_ = 0;
    std::size_t measured_phase_ = static_cast<std::size_t>(-1);
};

struct TraceSlots {
    SimTrace& trace;
    std::size_t n;

    bool record(std::size_t step) const { return step % trace.decimation == 0; }
    double* w(std::size_t step) const { return trace.w.data() + (step / trace.decimation) * n; }
    double* v(std::size_t step) const { return trace.v.data() + (step / trace.decimation) * n; }
    double* i(std::size_t step) const { return trace.i.data() + (step / trace.decimation) * n; }
};

void run_serial(RowEngine& eng, StepBook& book, const TraceSlots& slots, std::size_t steps, double dt) {
    const std::size_t n = eng.size();
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const RowSums s = eng.stage_assemble(0, n, t);
        eng.set_row(t);
        const double v_row = s.injected / (eng.g_row() + s.g_total);
        const bool rec = slots.record(step);
        const BlockSums b = eng.stage_advance(0, n, v_row, dt, rec ? slots.w(step) : nullptr,
                                              rec ? slots.v(step) : nullptr, rec ? slots.i(step) : nullptr);
        book.after_step(step, t, dt, v_row, eng.g_row(), b, eng);
    }
}

void run_parallel(RowEngine& eng, StepBook& book, const TraceSlots& slots, std::size_t steps, double dt) {
    const std::size_t n = eng.size();
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    const auto nb = static_cast<long long>(blocks);
    std::vector<RowSums> assemble(blocks);
    std::vector<BlockSums> advance(blocks);
    double v_row = 0.0;

#pragma omp parallel
    {
        for (std::size_t step = 0; step < steps; ++step) {
            const double t = static_cast<double>(step) * dt;
            const bool rec = slots.record(step);
#pragma omp for schedule(static)
            for (long long b = 0; b < nb; ++b) {
                const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
                assemble[b] = eng.stage_assemble(lo, std::min(n, lo + kBlockSize), t);
            }
#pragma omp single
            {
                RowSums s;
                for (const auto& a : assemble) {
                    s.g_total += a.g_total;
                    s.injected += a.injected;
                }
                eng.set_row(t);
                v_row = s.injected / (eng.g_row() + s.g_total);
            }
#pragma omp for schedule(static)
            for (long long b = 0; b < nb; ++b) {
                const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
                advance[b] = eng.stage_advance(lo, std::min(n, lo + kBlockSize), v_row, dt,
                                               rec ? slots.w(step) : nullptr, rec ? slots.v(step) : nullptr,
                                               rec ? slots.i(step) : nullptr);
            }
#pragma omp single
            {
                BlockSums total;
                for (const auto& a : advance) {
                    total.current += a.current;
                    total.abs_current += a.abs_current;
                }
                book.after_step(step, t, dt, v_row, eng.g_row(), total, eng);
            }
        }
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void require_valid(const SimOptions& o) {
    if (!(o.dt > 0.0)) throw ConfigError("time step must be positive");
    if (o.trace_decimation < 1) throw ConfigError("trace decimation must be at least 1");
    if (!(o.switch_open_resistance > o.switch_closed_resistance && o.switch_closed_resistance > 0.0))
        throw ConfigError("switch resistances must satisfy 0 < closed < open");
}

double NetworkSnapshot::kcl_residual() const {
    double sum = 0.0, scale = std::fabs(row_current);
    for (double c : device_currents) {
        sum += c;
        scale += std::fabs(c);
    }
    return scale > 0.0 ? std::fabs(sum - row_current) / scale : 0.0;
}

NetworkSnapshot solve_timestep(std::span<const double> device_resistances,
                               std::span<const std::optional<double>> column_drive,
                               std::span<const std::uint8_t> column_switch_closed, bool row_switch_closed,
                               const SimOptions& opts) {
    const std::size_t n = device_resistances.size();
    if (column_drive.size() != n || column_switch_closed.size() != n)
        throw SimError("solve_timestep: per-column inputs disagree in length");
    std::vector<double> g_dev(n), g_sw(n), drive(n), g_ser(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(device_resistances[i] > 0.0)) throw SimError("device resistance must be positive");
        g_dev[i] = 1.0 / device_resistances[i];
        g_sw[i] = 1.0 / (column_switch_closed[i] ? opts.switch_closed_resistance : opts.switch_open_resistance);
        drive[i] = column_drive[i].value_or(0.0);
    }
    const double g_row = 1.0 / (row_switch_closed ? opts.switch_closed_resistance : opts.switch_open_resistance);
    kernels::RowSystem sys{g_dev, g_sw, drive, g_row};
    NetworkSnapshot snap;
    snap.device_currents.resize(n);
    snap.device_voltages.resize(n);
    auto r = kernels::solve_row_serial(sys, {g_ser, snap.device_currents, snap.device_voltages});
    if (!std::isfinite(r.v_row)) throw SimError("singular row system");
    snap.v_row = r.v_row;
    snap.row_current = r.row_current;
    snap.column_voltages.resize(n);
    for (std::size_t i = 0; i < n; ++i) snap.column_voltages[i] = snap.v_row + snap.device_voltages[i];
    return snap;
}

std::size_t step_count(const Schedule& schedule, double dt) {
    return static_cast<std::size_t>(std::llround(schedule.total_time / dt));
}

SimTrace run_transient(const ExecutionPlan& plan, const Schedule& schedule, std::span<const VteamParams> params,
                       const SimOptions& opts, StepObserver* observer) {
    require_valid(opts);
    const std::size_t n = plan.row_size;
    if (schedule.n_columns != n || schedule.column_waveforms.size() != n || schedule.column_switch_waveforms.size() != n)
        throw ConfigError("schedule does not match the plan's row size");
    if (schedule.phases.size() != 1 + plan.sequence.size() + n)
        throw ConfigError("schedule phase count does not match the plan");
    if (params.size() != n)
        throw ConfigError("expected " + std::to_string(n) + " device parameter sets, got " + std::to_string(params.size()));
    for (const auto& p : params) require_valid(p);

    SimTrace trace;
    trace.n_devices = n;
    trace.dt = opts.dt;
    trace.total_time = schedule.total_time;
    trace.steps = step_count(schedule, opts.dt);
    trace.decimation = opts.trace_decimation;
    const std::size_t samples = trace.steps == 0 ? 0 : (trace.steps - 1) / trace.decimation + 1;
    trace.times.resize(samples);
    for (std::size_t s = 0; s < samples; ++s) trace.times[s] = static_cast<double>(s * trace.decimation) * opts.dt;
    trace.w.resize(samples * n);
    trace.v.resize(samples * n);
    trace.i.resize(samples * n);

    const bool parallel = opts.kernel == Kernel::OpenMP ||
                          (opts.kernel == Kernel::Auto && n >= opts.auto_parallel_columns && kernels::max_threads() > 1);
    trace.kernel_used = parallel ? Kernel::OpenMP : Kernel::Serial;

    RowEngine eng(schedule, params, opts);
    StepBook book(schedule, params, trace, observer);
    TraceSlots slots{trace, n};
    if (observer) observer->on_start(schedule, trace.steps);
    if (parallel) run_parallel(eng, book, slots, trace.steps, opts.dt);
    else run_serial(eng, book, slots, trace.steps, opts.dt);

    trace.final_w.resize(n);
    trace.final_states.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        trace.final_w[d] = MemristorState{eng.w()[d]};
        trace.final_states[d] = to_logic(trace.final_w[d], params[d]) ? 1 : 0;
    }
    if (trace.reads.size() != n) throw SimError("read phases produced " + std::to_string(trace.reads.size()) +
                                                " measurements for " + std::to_string(n) + " devices");
    return trace;
}

std::vector<std::uint8_t> read_states(const SimTrace& trace) {
    std::vector<std::uint8_t> bits(trace.n_devices, 0);
    for (const auto& r : trace.reads) bits[r.device] = r.current >= r.threshold_current ? 1 : 0;
    return bits;
}

std::string trace_csv(const SimTrace& trace) {
    std::string out = "time,device,w,v,i\n";
    const std::size_t n = trace.n_devices;
    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        const std::string t = fmt(trace.times[s]);
        for (std::size_t d = 0; d < n; ++d) {
            const std::size_t k = s * n + d;
            out += t + "," + std::to_string(d) + "," + fmt(trace.w[k]) + "," + fmt(trace.v[k]) + "," + fmt(trace.i[k]) + "\n";
        }
    }
    return out;
}

std::string trace_summary_json(const SimTrace& trace) {
    nlohmann::ordered_json j;
    j["devices"] = trace.n_devices;
    j["steps"] = trace.steps;
    j["dt"] = trace.dt;
    j["total_time"] = trace.total_time;
    j["final_states"] = trace.final_states;
    std::vector<double> w;
    for (const auto& s : trace.final_w) w.push_back(s.w);
    j["final_w"] = w;
    j["read_bits"] = read_states(trace);
    auto reads = nlohmann::ordered_json::array();
    for (const auto& r : trace.reads) {
        reads.push_back({{"device", r.device}, {"time", r.time}, {"voltage", r.voltage},
                         {"current", r.current}, {"threshold_current", r.threshold_current}});
    }
    j["reads"] = reads;
    j["max_kcl_residual"] = trace.max_kcl_residual;
    return j.dump(2) + "\n";
}

}  // namespace magicsim
