#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "magicsim/kernels.hpp"

using namespace magicsim::kernels;

namespace {

struct Case {
    std::vector<double> g_dev, g_sw, drive;
    double g_row;
};

Case random_case(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> r(1e4, 1e6), v(-1.0, 2.5);
    std::bernoulli_distribution closed(0.3);
    Case c;
    for (std::size_t i = 0; i < n; ++i) {
        c.g_dev.push_back(1.0 / r(rng));
        const bool on = closed(rng);
        c.g_sw.push_back(on ? 1.0 : 1e-12);
        c.drive.push_back(on ? v(rng) : 0.0);
    }
    c.g_row = closed(rng) ? 1.0 : 1e-12;
    return c;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and OpenMP kernels agree") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 5u, 63u, 64u, 65u, 300u, 1024u}) {
        const Case c = random_case(rng, n);
        const RowSystem sys{c.g_dev, c.g_sw, c.drive, c.g_row};
        std::vector<double> gs1(n), i1(n), v1(n), gs2(n), i2(n), v2(n);
        const RowResult a = solve_row_serial(sys, {gs1, i1, v1});
        const RowResult b = solve_row_omp(sys, {gs2, i2, v2});
        CAPTURE(n);
        CHECK(b.v_row == doctest::Approx(a.v_row).epsilon(1e-12));
        CHECK(b.row_current == doctest::Approx(a.row_current).epsilon(1e-12));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(gs2[i] == gs1[i]);
            CHECK(i2[i] == doctest::Approx(i1[i]).epsilon(1e-9).scale(1e-15));
        }
    }
}

TEST_CASE("kernel satisfies current conservation at the row node") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) * 7;
        const Case c = random_case(rng, n);
        const RowSystem sys{c.g_dev, c.g_sw, c.drive, c.g_row};
        std::vector<double> gs(n), cur(n), v(n);
        const RowResult r = solve_row_serial(sys, {gs, cur, v});
        const double scale = r.abs_current + std::fabs(r.row_current);
        if (scale > 0) CHECK(std::fabs(r.device_current - r.row_current) / scale < 1e-12);
    }
}

TEST_CASE("OpenMP kernel is independent of the thread count") {
    std::mt19937_64 rng(13);
    const Case c = random_case(rng, 777);
    const RowSystem sys{c.g_dev, c.g_sw, c.drive, c.g_row};
    std::vector<double> gs(777), cur(777), v(777);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const RowResult a = solve_row_omp(sys, {gs, cur, v});
    const std::vector<double> first = cur;
    omp_set_num_threads(4);
    const RowResult b = solve_row_omp(sys, {gs, cur, v});
    omp_set_num_threads(saved);
    CHECK(a.v_row == b.v_row);
    CHECK(a.row_current == b.row_current);
    CHECK(first == cur);
    CHECK(max_threads() >= 1);
}

}  // TEST_SUITE
