#pragma once

// Per-timestep nodal solve of one crossbar row.
//
// Column i reaches the shared row node r0 through its device (g_device)
// and its source E_i through its relay (g_switch). Eliminating the column
// nodes leaves a single unknown:
//
//   g_i   = g_switch_i * g_device_i / (g_switch_i + g_device_i)
//   V(r0) = sum(g_i * E_i) / (g_row + sum(g_i))
//   I_i   = g_i * (E_i - V(r0))            (column -> row)
//   v_i   = I_i / g_device_i               (V(c_i) - V(r0))
//
// The serial kernel is the reference; the OpenMP kernel reduces over
// fixed-size blocks so its result does not depend on the thread count.

#include <cstddef>
#include <span>

namespace magicsim::kernels {

inline constexpr std::size_t kBlockSize = 64;

struct RowSystem {
    std::span<const double> g_device;
    std::span<const double> g_switch;
    std::span<const double> drive;
    double g_row = 0.0;
};

struct RowOutputs {
    std::span<double> g_series;
    std::span<double> current;
    std::span<double> device_voltage;
};

struct RowSums {
    double g_total = 0.0;    // sum g_i
    double injected = 0.0;   // sum g_i * E_i
};

struct RowResult {
    double v_row = 0.0;
    double row_current = 0.0;      // into ground through the row relay
    double device_current = 0.0;   // sum I_i
    double abs_current = 0.0;      // sum |I_i|
};

// Building blocks shared with the transient engine.
RowSums assemble_range(const RowSystem& sys, std::span<double> g_series, std::size_t lo, std::size_t hi);
void currents_range(const RowSystem& sys, std::span<const double> g_series, double v_row, std::span<double> current,
                    std::span<double> device_voltage, std::size_t lo, std::size_t hi);

RowResult solve_row_serial(const RowSystem& sys, const RowOutputs& out);
RowResult solve_row_omp(const RowSystem& sys, const RowOutputs& out);

// Thread count the OpenMP kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace magicsim::kernels
