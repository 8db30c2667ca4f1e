// Serial reference vs OpenMP kernels, for the row solve alone and for a
// whole transient run on a padded half adder.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "magicsim/fixtures.hpp"
#include "magicsim/kernels.hpp"
#include "magicsim/sim.hpp"

namespace {

using namespace magicsim;

struct Row {
    std::vector<double> g_dev, g_sw, drive, gs, cur, v;
    double g_row = 1.0;

    explicit Row(std::size_t n) : gs(n), cur(n), v(n) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> r(1e4, 1e6);
        for (std::size_t i = 0; i < n; ++i) {
            g_dev.push_back(1.0 / r(rng));
            g_sw.push_back(i % 3 == 0 ? 1.0 : 1e-12);
            drive.push_back(i % 3 == 0 ? 2.0 : 0.0);
        }
    }
    kernels::RowSystem system() const { return {g_dev, g_sw, drive, g_row}; }
    kernels::RowOutputs outputs() { return {gs, cur, v}; }
};

void BM_RowSerial(benchmark::State& state) {
    Row row(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::solve_row_serial(row.system(), row.outputs()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RowOpenMP(benchmark::State& state) {
    Row row(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::solve_row_omp(row.system(), row.outputs()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void transient(benchmark::State& state, Kernel kernel) {
    const ExecutionPlan plan = fixtures::padded_half_adder(static_cast<std::size_t>(state.range(0)));
    const InputPattern pat = parse_pattern("11", 2);
    const Schedule s = build_schedule(plan, pat);
    const std::vector<VteamParams> params(plan.row_size, default_params());
    SimOptions opts;
    opts.kernel = kernel;
    opts.trace_decimation = 100000;
    for (auto _ : state) benchmark::DoNotOptimize(run_transient(plan, s, params, opts).final_states);
}

void BM_TransientSerial(benchmark::State& state) { transient(state, Kernel::Serial); }
void BM_TransientOpenMP(benchmark::State& state) { transient(state, Kernel::OpenMP); }

}  // namespace

BENCHMARK(BM_RowSerial)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_RowOpenMP)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_TransientSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransientOpenMP)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
