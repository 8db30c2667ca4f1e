#include <doctest.h>

#include <cmath>
#include <random>

#include "magicsim/device.hpp"
#include "magicsim/error.hpp"
#include "support/oracles.hpp"

using namespace magicsim;

namespace {

testsupport::Vteam reference_of(const VteamParams& p) {
    return {p.v_set, p.v_reset, p.k_set, p.k_reset, p.alpha_set, p.alpha_reset, p.w_min, p.w_max, p.r_on, p.r_off};
}

MemristorState hold(MemristorState s, double v, double duration, double dt, const VteamParams& p) {
    const auto steps = std::llround(duration / dt);
    for (long long k = 0; k < steps; ++k) s = step_state(s, v, dt, p);
    return s;
}

}  // namespace

TEST_SUITE("device") {

TEST_CASE("resistance interpolates between the bounds") {
    const VteamParams p = default_params();
    CHECK(resistance({p.w_max}, p) == doctest::Approx(p.r_on));
    CHECK(resistance({p.w_min}, p) == doctest::Approx(p.r_off));
    CHECK(resistance({(p.w_min + p.w_max) / 2}, p) == doctest::Approx((p.r_on + p.r_off) / 2));
}

TEST_CASE("ohmic current") {
    const VteamParams p = default_params();
    CHECK(current(0.0, {p.w_max}, p) == 0.0);
    CHECK(current(0.2, {p.w_max}, p) == doctest::Approx(20e-6));
    CHECK(current(-0.5, {p.w_min}, p) == doctest::Approx(-0.5e-6));
}

TEST_CASE("threshold ODE") {
    VteamParams p = default_params();
    CHECK(state_derivative(0.5, {0}, p) == 0.0);
    CHECK(state_derivative(-0.2, {0}, p) == 0.0);
    CHECK(state_derivative(p.v_set, {0}, p) == 0.0);
    CHECK(state_derivative(p.v_reset, {0}, p) == 0.0);
    CHECK(state_derivative(1.5, {0}, p) > 0.0);
    CHECK(state_derivative(-0.4, {0}, p) < 0.0);
    p.alpha_set = 1.0;
    CHECK(state_derivative(2 * p.v_set, {0}, p) == doctest::Approx(p.k_set));
    p.alpha_reset = 2.0;
    CHECK(state_derivative(3 * p.v_reset, {0}, p) == doctest::Approx(4 * p.k_reset));
}

TEST_CASE("derivative matches the reference formula across voltages") {
    const VteamParams p = default_params();
    const auto ref = reference_of(p);
    for (double v = -3.0; v <= 3.0; v += 0.0137) CHECK(state_derivative(v, {0}, p) == doctest::Approx(ref.rate(v)));
}

TEST_CASE("step_state examples") {
    const VteamParams p = default_params();
    const MemristorState mid{1.3e-9};
    CHECK(step_state(mid, 0.0, 1e-12, p) == mid);
    CHECK(step_state(mid, 0.0, 1.0, p) == mid);
    CHECK(hold({p.w_min}, 2.0, 1.3e-9, 1e-12, p).w == p.w_max);
    CHECK(hold({p.w_max}, -0.5, 1.3e-9, 1e-12, p).w == p.w_min);
}

TEST_CASE("Euler trajectory matches an independent integrator") {
    const VteamParams p = default_params();
    const auto ref = reference_of(p);
    for (double v : {1.3, 1.6, 2.0, -0.35, -0.5}) {
        double w_ref = v > 0 ? p.w_min : p.w_max;
        MemristorState s{w_ref};
        for (int k = 0; k < 2000; ++k) {
            s = step_state(s, v, 1e-12, p);
            w_ref = ref.step(w_ref, v, 1e-12);
        }
        CHECK(s.w == doctest::Approx(w_ref).epsilon(1e-12));
    }
}

TEST_CASE("to_logic threshold at the geometric mean") {
    const VteamParams p = default_params();
    CHECK(to_logic({p.w_max}, p));
    CHECK_FALSE(to_logic({p.w_min}, p));
    // Solve R(w) = sqrt(r_on r_off) for w.
    const double r_mid = std::sqrt(p.r_on * p.r_off);
    const double w_tie = p.w_max - (r_mid - p.r_on) / (p.r_off - p.r_on) * (p.w_max - p.w_min);
    CHECK(resistance({w_tie}, p) == doctest::Approx(r_mid));
    CHECK(to_logic({std::nextafter(w_tie, p.w_max)}, p));
    CHECK_FALSE(to_logic({std::nextafter(w_tie, p.w_min) - 1e-15}, p));
}

TEST_CASE("property: bounded, monotone, dead zone exact") {
    const VteamParams p = default_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> volts(-3.0, 3.0), dead(p.v_reset + 1e-9, p.v_set - 1e-9);
    for (int trial = 0; trial < 200; ++trial) {
        MemristorState s{std::uniform_real_distribution<double>(p.w_min, p.w_max)(rng)};
        for (int k = 0; k < 200; ++k) {
            s = step_state(s, volts(rng), 1e-11, p);
            REQUIRE(s.w >= p.w_min);
            REQUIRE(s.w <= p.w_max);
        }
        const MemristorState frozen = s;
        for (int k = 0; k < 1000; ++k) s = step_state(s, dead(rng), 1e-12, p);
        CHECK(s == frozen);

        const double v_up = std::uniform_real_distribution<double>(p.v_set, 3.0)(rng);
        const double v_dn = std::uniform_real_distribution<double>(-3.0, p.v_reset)(rng);
        MemristorState up = frozen, dn = frozen;
        for (int k = 0; k < 300; ++k) {
            const auto nu = step_state(up, v_up, 1e-12, p);
            const auto nd = step_state(dn, v_dn, 1e-12, p);
            REQUIRE(nu.w >= up.w);
            REQUIRE(nd.w <= dn.w);
            up = nu;
            dn = nd;
        }
    }
}

TEST_CASE("property: halving dt barely moves the calibration SET transient") {
    const VteamParams p = default_params();
    // Stop halfway through the switch so the comparison is not trivially at the clamp.
    const double t_half = 0.25 * 1.3e-9;
    const double w1 = hold({p.w_min}, 2.0, t_half, 1e-12, p).w;
    const double w2 = hold({p.w_min}, 2.0, t_half, 0.5e-12, p).w;
    CHECK(w1 > p.w_min);
    CHECK(w1 < p.w_max);
    CHECK(std::fabs(w1 - w2) / w1 < 0.01);
    CHECK(hold({p.w_min}, 2.0, 1.3e-9, 0.5e-12, p).w == p.w_max);
}

TEST_CASE("read voltages sit in the dead zone") {
    const VteamParams p = default_params();
    for (double v : {0.2, -0.2, 0.4}) {
        for (double w : {p.w_min, p.w_max, 1e-9}) CHECK(hold({w}, v, 100e-9, 1e-12, p).w == w);
    }
}

TEST_CASE("calibration reproduces the frozen defaults") {
    const VteamParams cal = calibrate_params(CalibrationTargets{});
    const VteamParams def = default_params();
    CHECK(cal.k_set == doctest::Approx(def.k_set).epsilon(1e-9));
    CHECK(cal.k_reset == doctest::Approx(def.k_reset).epsilon(1e-9));
    const CalibrationTargets t;
    const double budget = t.settle_fraction * t.pulse_width;
    const double t_set = switching_time(def, t.set_voltage, t.dt, 10e-9);
    const double t_reset = switching_time(def, t.reset_voltage, t.dt, 10e-9);
    CHECK(t_set > 0.0);
    CHECK(t_set <= budget + 1e-15);
    CHECK(t_reset > 0.0);
    CHECK(t_reset <= budget + 1e-15);
    // A slightly weaker coefficient misses the budget, so the bound is tight.
    VteamParams slow = def;
    slow.k_set *= 0.99;
    CHECK(switching_time(slow, t.set_voltage, t.dt, 10e-9) > budget);
}

TEST_CASE("calibrated operating point separates the MAGIC cases") {
    const VteamParams p = default_params();
    // Operation voltage cannot SET an HRS input, and a NOR divider with one
    // LRS input drives the output past the RESET threshold.
    CHECK(p.v_set > 1.0);
    const double g_on = 1 / p.r_on, g_off = 1 / p.r_off;
    const double v_row = (g_on * 1.0 + g_off * 1.0) / (g_on + g_off + g_on);
    CHECK(-v_row < p.v_reset);
    const double v_row_hrs = (2 * g_off) / (2 * g_off + g_on);
    CHECK(-v_row_hrs > p.v_reset);
}

TEST_CASE("parameter validation") {
    VteamParams p = default_params();
    CHECK(check_params(p).empty());
    p.r_on = 2e6;
    CHECK_FALSE(check_params(p).empty());
    CHECK_THROWS_AS(require_valid(p), ConfigError);
    p = default_params();
    p.v_reset = 0.1;
    CHECK_THROWS_AS(require_valid(p), ConfigError);
    p = default_params();
    p.w_min = p.w_max;
    CHECK_THROWS_AS(require_valid(p), ConfigError);
}

TEST_CASE("parameter files round-trip") {
    const VteamParams p = default_params();
    CHECK(parse_params(render_params(p)) == p);
    CHECK(load_params("default") == p);
    CHECK(parse_params("r_on = 20e3\n# comment\n").r_on == 20e3);
    CHECK_THROWS_AS(parse_params("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_params("r_on = abc\n"), ConfigError);
    CHECK_THROWS_AS(load_params("/nonexistent/params"), IoError);
}

TEST_CASE("preset file matches the built-in defaults") {
    CHECK(load_params(std::string(MAGICSIM_SOURCE_DIR) + "/presets/vteam_default.params") == default_params());
}

TEST_CASE("variation: zero sigma and determinism") {
    const VteamParams p = default_params();
    VariationSpec none;
    CHECK(sample_varied_params(p, none, 3) == p);
    VariationSpec zero;
    zero.sigma["r_on"] = 0.0;
    CHECK(sample_varied_params(p, zero, 3) == p);

    VariationSpec spec;
    spec.sigma = {{"r_on", 0.05}, {"k_set", 0.1}};
    spec.seed = 99;
    CHECK(sample_varied_params(p, spec, 17) == sample_varied_params(p, spec, 17));
    CHECK_FALSE(sample_varied_params(p, spec, 17) == sample_varied_params(p, spec, 18));
    const VteamParams v = sample_varied_params(p, spec, 17);
    CHECK(v.r_off == p.r_off);
    CHECK(v.v_set == p.v_set);
}

TEST_CASE("variation: sample statistics of r_on") {
    const VteamParams p = default_params();
    VariationSpec spec;
    spec.sigma["r_on"] = 0.05;
    spec.seed = 2024;
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double r = sample_varied_params(p, spec, static_cast<std::size_t>(k)).r_on;
        sum += r;
        sq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
    CHECK(std::fabs(mean - p.r_on) / p.r_on < 0.01);
    CHECK(std::fabs(sd - 0.05 * p.r_on) / (0.05 * p.r_on) < 0.10);
}

TEST_CASE("variation: bad specs") {
    const VteamParams p = default_params();
    VariationSpec neg;
    neg.sigma["r_on"] = -0.1;
    CHECK_THROWS_AS(sample_varied_params(p, neg, 0), ConfigError);
    VariationSpec unknown;
    unknown.sigma["q"] = 0.1;
    CHECK_THROWS_AS(sample_varied_params(p, unknown, 0), ConfigError);

    // Wild spreads violate some invariant on most draws; the retry budget
    // must eventually give up on at least one device.
    VariationSpec wild;
    for (const auto& f : kParamFields) wild.sigma[f.name] = 1e3;
    int failures = 0;
    for (std::size_t d = 0; d < 20; ++d) {
        try {
            (void)sample_varied_params(p, wild, d);
        } catch (const ConfigError&) {
            ++failures;
        }
    }
    CHECK(failures > 0);
}

}  // TEST_SUITE
