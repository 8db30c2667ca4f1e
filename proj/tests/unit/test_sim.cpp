#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include <json.hpp>

#include "magicsim/error.hpp"
#include "magicsim/fixtures.hpp"
#include "magicsim/oracle.hpp"
#include "magicsim/sim.hpp"
#include "support/oracles.hpp"

using namespace magicsim;

namespace {

std::vector<VteamParams> defaults(std::size_t n) { return std::vector<VteamParams>(n, default_params()); }

SimTrace simulate(const ExecutionPlan& plan, const std::string& pattern, SimOptions opts = {}) {
    const InputPattern pat = parse_pattern(pattern, plan.inputs.size());
    return run_transient(plan, build_schedule(plan, pat), defaults(plan.row_size), opts);
}

std::uint8_t bit(const SimTrace& t, std::size_t d) { return t.final_states.at(d); }

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("series path through one device") {
    const std::vector<double> r{10e3};
    const std::vector<std::optional<double>> drive{2.0};
    const std::vector<std::uint8_t> closed{1};
    const NetworkSnapshot s = solve_timestep(r, drive, closed, true);
    CHECK(s.device_currents[0] == doctest::Approx(2.0 / (1 + 10000 + 1)));
    CHECK(s.device_currents[0] == doctest::Approx(199.96e-6).epsilon(1e-4));
    CHECK(s.row_current == doctest::Approx(s.device_currents[0]));
    CHECK(s.kcl_residual() < 1e-12);
}

TEST_CASE("all switches open leaves only leakage") {
    const std::vector<double> r{10e3, 1e6, 10e3};
    const std::vector<std::optional<double>> drive{2.0, 1.0, std::nullopt};
    const std::vector<std::uint8_t> closed{0, 0, 0};
    const NetworkSnapshot s = solve_timestep(r, drive, closed, false);
    for (double i : s.device_currents) CHECK(std::fabs(i) < 10 * 2.0 / 1e12);
}

TEST_CASE("NOR divider with two LRS inputs") {
    SimOptions o;
    o.switch_closed_resistance = 1e-9;
    const std::vector<double> r{10e3, 10e3, 10e3};
    const std::vector<std::optional<double>> drive{1.0, 1.0, 0.0};
    const std::vector<std::uint8_t> closed{1, 1, 1};
    const NetworkSnapshot s = solve_timestep(r, drive, closed, false, o);
    // The open row relay leaks 1 pS to ground, a few parts in 1e9 here.
    CHECK(s.v_row == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
    CHECK(s.device_voltages[2] == doctest::Approx(-2.0 / 3.0).epsilon(1e-7));
    CHECK(s.device_voltages[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("property: closed-form solve equals full nodal analysis") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> res(1e4, 1e6), volt(-1.0, 2.0);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 40;
        std::vector<double> r(n);
        std::vector<std::optional<double>> drive(n);
        std::vector<std::uint8_t> closed(n);
        std::vector<bool> closed_b(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = res(rng);
            if (coin(rng)) drive[i] = volt(rng);
            closed[i] = coin(rng);
            closed_b[i] = closed[i];
        }
        const bool row = coin(rng);
        const NetworkSnapshot s = solve_timestep(r, drive, closed, row);
        const auto ref = testsupport::nodal_row(r, drive, closed_b, row);
        CHECK(s.v_row == doctest::Approx(ref.v_row).epsilon(1e-9).scale(1e-12));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s.device_currents[i] == doctest::Approx(ref.device_current[i]).epsilon(1e-7).scale(1e-15));
            CHECK(s.column_voltages[i] == doctest::Approx(ref.column[i]).epsilon(1e-9).scale(1e-12));
        }
        // With the row relay open the net row current is a difference of
        // much larger branch currents, so cancellation limits the residual.
        CHECK(s.kcl_residual() < 1e-9);
    }
}

TEST_CASE("solve_timestep rejects bad input") {
    const std::vector<double> r{0.0};
    const std::vector<std::optional<double>> drive{1.0};
    const std::vector<std::uint8_t> closed{1};
    CHECK_THROWS_AS(solve_timestep(r, drive, closed, true), SimError);
    const std::vector<double> r2{1e4, 1e4};
    CHECK_THROWS_AS(solve_timestep(r2, drive, closed, true), SimError);
}

TEST_CASE("half adder end to end") {
    const ExecutionPlan plan = fixtures::half_adder();
    const SimTrace t10 = simulate(plan, "10");
    CHECK(bit(t10, 4) == 1);
    CHECK(bit(t10, 2) == 0);
    const SimTrace t11 = simulate(plan, "11");
    CHECK(bit(t11, 4) == 0);
    CHECK(bit(t11, 2) == 1);
    for (const std::string p : {"00", "01", "10", "11"}) {
        const SimTrace t = simulate(plan, p);
        CAPTURE(p);
        CHECK(read_states(t) == t.final_states);
        CHECK(t.reads.size() == plan.row_size);
        CHECK(t.max_kcl_residual < 1e-12);
    }
}

TEST_CASE("idle row reads all zeros") {
    ExecutionPlan plan;
    plan.row_size = 3;
    const SimTrace t = simulate(plan, "");
    CHECK(t.final_states == std::vector<std::uint8_t>{0, 0, 0});
    REQUIRE(t.reads.size() == 3);
    const VteamParams p = default_params();
    for (const auto& r : t.reads) CHECK(r.current == doctest::Approx(0.2 / (p.r_off + 2.0)).epsilon(1e-6));
}

TEST_CASE("read_states threshold") {
    SimTrace t;
    t.n_devices = 2;
    const double thr = 0.2 / std::sqrt(10e3 * 1e6);
    t.reads = {{0, 0.0, 0.2, 20e-6, thr}, {1, 0.0, 0.2, 0.2e-6, thr}};
    CHECK(read_states(t) == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("read measurements sit at window midpoints") {
    const ExecutionPlan plan = fixtures::half_adder();
    const InputPattern pat = parse_pattern("10", 2);
    const Schedule s = build_schedule(plan, pat);
    const SimTrace t = run_transient(plan, s, defaults(5));
    for (std::size_t d = 0; d < 5; ++d) {
        const PhaseWindow& w = s.phases[8 + d];
        CHECK(t.reads[d].device == d);
        CHECK(t.reads[d].time >= 0.5 * (w.t_start + w.t_end));
        CHECK(t.reads[d].time < 0.5 * (w.t_start + w.t_end) + 2e-12);
        CHECK(t.reads[d].voltage == doctest::Approx(0.2).epsilon(1e-3));
    }
}

TEST_CASE("devices outside a phase do not move") {
    const ExecutionPlan plan = fixtures::half_adder();
    const InputPattern pat = parse_pattern("11", 2);
    const Schedule s = build_schedule(plan, pat);
    SimOptions o;
    o.trace_decimation = 1;
    const SimTrace t = run_transient(plan, s, defaults(5), o);
    auto w_at = [&](double time, std::size_t d) {
        const auto step = static_cast<std::size_t>(std::llround(time / o.dt));
        if (step >= t.times.size()) return t.final_w[d].w;
        return t.w[step * 5 + d];
    };
    for (const auto& ph : s.phases) {
        for (std::size_t d = 0; d < 5; ++d) {
            if (std::find(ph.touched_devices.begin(), ph.touched_devices.end(), d) != ph.touched_devices.end()) continue;
            CHECK(w_at(ph.t_start, d) == w_at(ph.t_end, d));
        }
    }
}

TEST_CASE("halving dt flips no output bit") {
    SimOptions fine;
    fine.dt = 0.5e-12;
    for (const auto& plan : {fixtures::half_adder(), fixtures::c17()}) {
        for (const std::string p : {"I1", "I2", "I3"}) {
            CHECK(simulate(plan, p).final_states == simulate(plan, p, fine).final_states);
        }
    }
}

TEST_CASE("identical inputs give bitwise identical traces") {
    const ExecutionPlan plan = fixtures::c17();
    const SimTrace a = simulate(plan, "I3");
    const SimTrace b = simulate(plan, "I3");
    CHECK(a.w == b.w);
    CHECK(a.v == b.v);
    CHECK(a.i == b.i);
    CHECK(trace_csv(a) == trace_csv(b));
}

TEST_CASE("OpenMP engine matches the serial reference") {
    const ExecutionPlan plan = fixtures::padded_half_adder(300);
    SimOptions serial, omp;
    serial.kernel = Kernel::Serial;
    serial.trace_decimation = 1000;
    omp.kernel = Kernel::OpenMP;
    omp.trace_decimation = 1000;
    for (const std::string p : {"10", "11"}) {
        const SimTrace a = simulate(plan, p, serial);
        const SimTrace b = simulate(plan, p, omp);
        CHECK(a.kernel_used == Kernel::Serial);
        CHECK(b.kernel_used == Kernel::OpenMP);
        CHECK(a.final_states == b.final_states);
        for (std::size_t d = 0; d < plan.row_size; ++d)
            CHECK(b.final_w[d].w == doctest::Approx(a.final_w[d].w).epsilon(1e-9).scale(1e-18));
        REQUIRE(a.reads.size() == b.reads.size());
        for (std::size_t k = 0; k < a.reads.size(); ++k)
            CHECK(b.reads[k].current == doctest::Approx(a.reads[k].current).epsilon(1e-9));
    }
}

TEST_CASE("mismatched inputs are configuration errors") {
    const ExecutionPlan plan = fixtures::half_adder();
    const Schedule s = build_schedule(plan, parse_pattern("10", 2));
    CHECK_THROWS_AS(run_transient(plan, s, defaults(4)), ConfigError);
    CHECK_THROWS_AS(run_transient(fixtures::padded_half_adder(6), s, defaults(6)), ConfigError);
    SimOptions bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(run_transient(plan, s, defaults(5), bad), ConfigError);
    bad = {};
    bad.trace_decimation = 0;
    CHECK_THROWS_AS(run_transient(plan, s, defaults(5), bad), ConfigError);
}

TEST_CASE("trace exports") {
    const ExecutionPlan plan = fixtures::half_adder();
    SimOptions o;
    o.trace_decimation = 100;
    const SimTrace t = simulate(plan, "10", o);
    CHECK(t.times.size() == (t.steps - 1) / 100 + 1);
    for (double x : t.times) {
        CHECK(x >= 0.0);
        CHECK(x <= t.total_time);
    }
    const std::string csv = trace_csv(t);
    CHECK(csv.rfind("time,device,w,v,i\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 1 + t.times.size() * 5);
    const auto j = nlohmann::json::parse(trace_summary_json(t));
    CHECK(j.at("final_states").get<std::vector<int>>() == std::vector<int>{1, 0, 0, 0, 1});
    CHECK(j.at("reads").size() == 5);
}

}  // TEST_SUITE
