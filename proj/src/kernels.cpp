#include "magicsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace magicsim::kernels {

RowSums assemble_range(const RowSystem& sys, std::span<double> g_series, std::size_t lo, std::size_t hi) {
    RowSums s;
    for (std::size_t i = lo; i < hi; ++i) {
        const double gs = sys.g_switch[i];
        const double gd = sys.g_device[i];
        const double g = gs * gd / (gs + gd);
        g_series[i] = g;
        s.g_total += g;
        s.injected += g * sys.drive[i];
    }
    return s;
}

void currents_range(const RowSystem& sys, std::span<const double> g_series, double v_row, std::span<double> current,
                    std::span<double> device_voltage, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        const double c = g_series[i] * (sys.drive[i] - v_row);
        current[i] = c;
        device_voltage[i] = c / sys.g_device[i];
    }
}

RowResult solve_row_serial(const RowSystem& sys, const RowOutputs& out) {
    const std::size_t n = sys.g_device.size();
    const RowSums s = assemble_range(sys, out.g_series, 0, n);
    RowResult r;
    r.v_row = s.injected / (sys.g_row + s.g_total);
    currents_range(sys, out.g_series, r.v_row, out.current, out.device_voltage, 0, n);
    for (std::size_t i = 0; i < n; ++i) {
        r.device_current += out.current[i];
        r.abs_current += std::fabs(out.current[i]);
    }
    r.row_current = r.v_row * sys.g_row;
    return r;
}

RowResult solve_row_omp(const RowSystem& sys, const RowOutputs& out) {
    const std::size_t n = sys.g_device.size();
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<RowSums> partial(blocks);
    std::vector<double> cur_sum(blocks), abs_sum(blocks);
    RowResult r;
    const auto nb = static_cast<long long>(blocks);

#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (long long b = 0; b < nb; ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
            partial[b] = assemble_range(sys, out.g_series, lo, std::min(n, lo + kBlockSize));
        }
#pragma omp single
        {
            RowSums s;
            for (const auto& p : partial) {
                s.g_total += p.g_total;
                s.injected += p.injected;
            }
            r.v_row = s.injected / (sys.g_row + s.g_total);
        }
#pragma omp for schedule(static)
        for (long long b = 0; b < nb; ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
            const std::size_t hi = std::min(n, lo + kBlockSize);
            currents_range(sys, out.g_series, r.v_row, out.current, out.device_voltage, lo, hi);
            double c = 0.0, a = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                c += out.current[i];
                a += std::fabs(out.current[i]);
            }
            cur_sum[b] = c;
            abs_sum[b] = a;
        }
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        r.device_current += cur_sum[b];
        r.abs_current += abs_sum[b];
    }
    r.row_current = r.v_row * sys.g_row;
    return r;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace magicsim::kernels
