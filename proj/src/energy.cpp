#include "magicsim/energy.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "magicsim/error.hpp"

namespace magicsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PhaseKind phase_from_string(const std::string& s) {
    for (std::size_t k = 0; k < kPhaseKinds; ++k) {
        if (s == to_string(static_cast<PhaseKind>(k))) return static_cast<PhaseKind>(k);
    }
    throw SchemaError("unknown phase '" + s + "'");
}

}  // namespace

double EnergyReport::device_total(std::size_t device) const {
    double s = 0.0;
    for (double e : per_device[device]) s += e;
    return s;
}

EnergyReport& EnergyReport::operator+=(const EnergyReport& other) {
    if (per_device.size() < other.per_device.size()) per_device.resize(other.per_device.size(), PhaseEnergy{});
    for (std::size_t d = 0; d < other.per_device.size(); ++d)
        for (std::size_t k = 0; k < kPhaseKinds; ++k) per_device[d][k] += other.per_device[d][k];
    grand_total = 0.0;
    for (std::size_t k = 0; k < kPhaseKinds; ++k) {
        per_phase_totals[k] += other.per_phase_totals[k];
        phase_steps[k] += other.phase_steps[k];
        grand_total += per_phase_totals[k];
    }
    switch_dissipation += other.switch_dissipation;
    source_energy += other.source_energy;
    total_steps += other.total_steps;
    if (window_energy.size() < other.window_energy.size()) window_energy.resize(other.window_energy.size(), 0.0);
    for (std::size_t w = 0; w < other.window_energy.size(); ++w) window_energy[w] += other.window_energy[w];
    return *this;
}

void EnergyIntegrator::on_start(const Schedule& schedule, std::size_t n_steps) {
    schedule_ = &schedule;
    cells_.assign(schedule.n_columns, PhaseEnergy{});
    window_.assign(schedule.phases.size(), 0.0);
    steps_ = {};
    total_steps_ = 0;
    switch_ = source_ = running_ = 0.0;
    series_.clear();
    series_.reserve(n_steps / std::max<std::size_t>(sample_every_, 1) + 1);
}

void EnergyIntegrator::on_step(const StepView& view) {
    const PhaseKind kind = schedule_->phases[view.phase].kind;
    const auto k = static_cast<std::size_t>(kind);
    double step_energy = 0.0;
    double sw = view.row_switch_power;
    double src = 0.0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const double e = view.device_voltage[i] * view.device_current[i] * view.dt;
        cells_[i][k] += e;
        step_energy += e;
        sw += view.switch_power[i];
        src += view.source_power[i];
    }
    switch_ += sw * view.dt;
    source_ += src * view.dt;
    window_[view.phase] += step_energy;
    running_ += step_energy;
    ++steps_[k];
    ++total_steps_;
    if (sample_every_ > 0 && view.step % sample_every_ == 0) series_.push_back({view.t, running_, kind});
}

EnergyReport EnergyIntegrator::report() const {
    EnergyReport r;
    r.per_device = cells_;
    for (std::size_t k = 0; k < kPhaseKinds; ++k) {
        double s = 0.0;
        for (const auto& cell : cells_) s += cell[k];
        r.per_phase_totals[k] = s;
        r.grand_total += s;
    }
    r.switch_dissipation = switch_;
    r.source_energy = source_;
    r.phase_steps = steps_;
    r.total_steps = total_steps_;
    r.window_energy = window_;
    return r;
}

SimRun integrate_energy(const ExecutionPlan& plan, const Schedule& schedule, std::span<const VteamParams> params,
                        const SimOptions& opts) {
    EnergyIntegrator integrator(opts.trace_decimation);
    SimRun run;
    run.trace = run_transient(plan, schedule, params, opts, &integrator);
    run.energy = integrator.report();
    run.cumulative = integrator.cumulative();
    return run;
}

CoarseEstimate coarse_estimate(const ExecutionPlan& plan, double e_not_avg, double e_nor_avg) {
    if (e_not_avg < 0.0 || e_nor_avg < 0.0) throw ConfigError("average gate energies must be non-negative");
    const GateCounts c = count_ops(plan);
    CoarseEstimate est{e_not_avg, e_nor_avg, c.nots, c.nors, 0.0};
    est.total = static_cast<double>(c.nots) * e_not_avg + static_cast<double>(c.nors) * e_nor_avg;
    return est;
}

EnergyComparison compare(const EnergyReport& report, const CoarseEstimate& coarse) {
    EnergyComparison c;
    c.fine_exec = report.phase_total(PhaseKind::Exec);
    c.coarse_total = coarse.total;
    c.ratio = coarse.total > 0.0 ? c.fine_exec / coarse.total : 0.0;
    c.uncovered = report.grand_total - c.fine_exec;
    return c;
}

std::string energy_csv(const EnergyReport& report) {
    std::string out = "device,phase,energy_J\n";
    for (std::size_t d = 0; d < report.per_device.size(); ++d)
        for (std::size_t k = 0; k < kPhaseKinds; ++k)
            out += std::to_string(d) + "," + to_string(static_cast<PhaseKind>(k)) + "," + fmt(report.per_device[d][k]) + "\n";
    return out;
}

std::string energy_json(const EnergyReport& report) {
    nlohmann::ordered_json j;
    j["plan"] = report.plan_name;
    j["pattern"] = report.pattern_name;
    j["params"] = report.params_id;
    j["grand_total_J"] = report.grand_total;
    nlohmann::ordered_json phases;
    for (std::size_t k = 0; k < kPhaseKinds; ++k) phases[to_string(static_cast<PhaseKind>(k))] = report.per_phase_totals[k];
    j["phase_totals_J"] = phases;
    nlohmann::ordered_json steps;
    for (std::size_t k = 0; k < kPhaseKinds; ++k) steps[to_string(static_cast<PhaseKind>(k))] = report.phase_steps[k];
    j["phase_steps"] = steps;
    j["total_steps"] = report.total_steps;
    j["switch_dissipation_J"] = report.switch_dissipation;
    j["source_energy_J"] = report.source_energy;
    auto devices = nlohmann::ordered_json::array();
    for (const auto& cell : report.per_device) {
        nlohmann::ordered_json d;
        for (std::size_t k = 0; k < kPhaseKinds; ++k) d[to_string(static_cast<PhaseKind>(k))] = cell[k];
        devices.push_back(d);
    }
    j["devices"] = devices;
    j["window_energy_J"] = report.window_energy;
    return j.dump(2) + "\n";
}

EnergyReport parse_energy_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed energy report", e.byte);
    }
    try {
        EnergyReport r;
        r.plan_name = j.at("plan").get<std::string>();
        r.pattern_name = j.at("pattern").get<std::string>();
        r.params_id = j.at("params").get<std::string>();
        r.grand_total = j.at("grand_total_J").get<double>();
        for (const auto& [name, v] : j.at("phase_totals_J").items())
            r.per_phase_totals[static_cast<std::size_t>(phase_from_string(name))] = v.get<double>();
        for (const auto& [name, v] : j.at("phase_steps").items())
            r.phase_steps[static_cast<std::size_t>(phase_from_string(name))] = v.get<std::size_t>();
        r.total_steps = j.at("total_steps").get<std::size_t>();
        r.switch_dissipation = j.at("switch_dissipation_J").get<double>();
        r.source_energy = j.at("source_energy_J").get<double>();
        for (const auto& d : j.at("devices")) {
            PhaseEnergy cell{};
            for (const auto& [name, v] : d.items()) cell[static_cast<std::size_t>(phase_from_string(name))] = v.get<double>();
            r.per_device.push_back(cell);
        }
        r.window_energy = j.at("window_energy_J").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("energy report: ") + e.what());
    }
}

std::string cumulative_csv(std::span<const CumulativeSample> series) {
    std::string out = "time,cumulative_J,phase\n";
    for (const auto& s : series) out += fmt(s.time) + "," + fmt(s.cumulative) + "," + to_string(s.phase) + "\n";
    return out;
}

}  // namespace magicsim
