#pragma once

// Fixed-step transient simulation of a single crossbar row driven by a
// compiled Schedule. Each step samples the PWL drive and relay-control
// waveforms, solves the resistive network with device resistances frozen,
// then advances every device state with explicit Euler.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magicsim/device.hpp"
#include "magicsim/mapping_ir.hpp"
#include "magicsim/schedule.hpp"

namespace magicsim {

enum class Kernel { Serial, OpenMP, Auto };

struct SimOptions {
    double dt = 1e-12;
    std::size_t trace_decimation = 10;
    double switch_control_threshold = 1.0;
    double switch_open_resistance = 1e12;
    double switch_closed_resistance = 1.0;
    // Auto picks OpenMP for rows of at least auto_parallel_columns devices.
    Kernel kernel = Kernel::Auto;
    std::size_t auto_parallel_columns = 256;
};

void require_valid(const SimOptions& o);

struct NetworkSnapshot {
    double v_row = 0.0;
    std::vector<double> column_voltages;
    std::vector<double> device_voltages;
    std::vector<double> device_currents;  // column -> row
    double row_current = 0.0;             // r0 -> ground through the row relay

    // |sum(device currents) - row current| relative to the current scale.
    double kcl_residual() const;
};

// column_drive[i] empty means the pin is undriven; it is then tied to 0 V
// behind its relay.
NetworkSnapshot solve_timestep(std::span<const double> device_resistances,
                               std::span<const std::optional<double>> column_drive,
                               std::span<const std::uint8_t> column_switch_closed, bool row_switch_closed,
                               const SimOptions& opts = {});

struct ReadMeasurement {
    std::size_t device = 0;
    double time = 0.0;
    double voltage = 0.0;            // across the device
    double current = 0.0;
    double threshold_current = 0.0;  // v_read / sqrt(r_on * r_off)
};

struct SimTrace {
    std::size_t n_devices = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    double total_time = 0.0;
    std::size_t decimation = 1;
    // Decimated samples; per-device arrays are indexed [sample * n + device]
    // and hold the values used by the solve at that time.
    std::vector<double> times;
    std::vector<double> w;
    std::vector<double> v;
    std::vector<double> i;
    std::vector<ReadMeasurement> reads;
    std::vector<MemristorState> final_w;
    std::vector<std::uint8_t> final_states;
    double max_kcl_residual = 0.0;
    Kernel kernel_used = Kernel::Serial;
};

// Full-rate per-step values handed to an observer.
struct StepView {
    std::size_t step;
    double t;
    double dt;
    std::size_t phase;
    std::span<const double> device_voltage;
    std::span<const double> device_current;
    std::span<const double> switch_power;   // column relay dissipation
    std::span<const double> source_power;   // E_i * I_i per column source
    double row_switch_power;
};

class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_start(const Schedule&, std::size_t /*n_steps*/) {}
    virtual void on_step(const StepView& view) = 0;
};

std::size_t step_count(const Schedule& schedule, double dt);

SimTrace run_transient(const ExecutionPlan& plan, const Schedule& schedule, std::span<const VteamParams> params,
                       const SimOptions& opts = {}, StepObserver* observer = nullptr);

// Bits sensed during the read phases.
std::vector<std::uint8_t> read_states(const SimTrace& trace);

// CSV `time,device,w,v,i` over the decimated samples.
std::string trace_csv(const SimTrace& trace);
// Final states and read measurements as JSON.
std::string trace_summary_json(const SimTrace& trace);

}  // namespace magicsim
