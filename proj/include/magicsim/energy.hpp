#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "magicsim/sim.hpp"

namespace magicsim {

using PhaseEnergy = std::array<double, kPhaseKinds>;

// Device energy is the time integral of V*I per memristor, attributed to
// the phase whose window contains each step. Relay dissipation and energy
// delivered by the column sources are tracked beside it.
struct EnergyReport {
    std::vector<PhaseEnergy> per_device;
    PhaseEnergy per_phase_totals{};
    double grand_total = 0.0;
    double switch_dissipation = 0.0;
    double source_energy = 0.0;
    std::array<std::size_t, kPhaseKinds> phase_steps{};
    std::size_t total_steps = 0;
    std::vector<double> window_energy;  // one entry per schedule phase window
    std::string plan_name;
    std::string pattern_name;
    std::string params_id;

    double device_total(std::size_t device) const;
    double phase_total(PhaseKind kind) const { return per_phase_totals[static_cast<std::size_t>(kind)]; }
    EnergyReport& operator+=(const EnergyReport& other);
    bool operator==(const EnergyReport&) const = default;
};

struct CumulativeSample {
    double time;
    double cumulative;
    PhaseKind phase;
};

class EnergyIntegrator : public StepObserver {
public:
    explicit EnergyIntegrator(std::size_t sample_every = 10) : sample_every_(sample_every) {}

    void on_start(const Schedule& schedule, std::size_t n_steps) override;
    void on_step(const StepView& view) override;

    EnergyReport report() const;
    const std::vector<CumulativeSample>& cumulative() const { return series_; }

private:
    std::size_t sample_every_;
    const Schedule* schedule_ = nullptr;
    std::vector<PhaseEnergy> cells_;
    std::vector<double> window_;
    std::array<std::size_t, kPhaseKinds> steps_{};
    std::size_t total_steps_ = 0;
    double switch_ = 0.0;
    double source_ = 0.0;
    double running_ = 0.0;
    std::vector<CumulativeSample> series_;
};

struct SimRun {
    SimTrace trace;
    EnergyReport energy;
    std::vector<CumulativeSample> cumulative;
};

// run_transient with an EnergyIntegrator attached.
SimRun integrate_energy(const ExecutionPlan& plan, const Schedule& schedule, std::span<const VteamParams> params,
                        const SimOptions& opts = {});

struct CoarseEstimate {
    double e_not_avg = 0.0;
    double e_nor_avg = 0.0;
    std::size_t count_not = 0;
    std::size_t count_nor = 0;
    double total = 0.0;
};

CoarseEstimate coarse_estimate(const ExecutionPlan& plan, double e_not_avg, double e_nor_avg);

struct EnergyComparison {
    double fine_exec = 0.0;
    double coarse_total = 0.0;
    double ratio = 0.0;      // fine_exec / coarse_total (0 when coarse is 0)
    double uncovered = 0.0;  // load + init + reinit + read
};

EnergyComparison compare(const EnergyReport& report, const CoarseEstimate& coarse);

// Rows of (device, phase, energy_J).
std::string energy_csv(const EnergyReport& report);
std::string energy_json(const EnergyReport& report);
EnergyReport parse_energy_json(std::string_view text);
std::string cumulative_csv(std::span<const CumulativeSample> series);

}  // namespace magicsim
