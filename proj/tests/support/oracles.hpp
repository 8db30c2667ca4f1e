#pragma once

// Independent reference computations for tests. Nothing here calls into
// the library's solver or device code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
        x[k] = s / a[k][k];
    }
    return x;
}

struct RowSolution {
    double v_row = 0.0;
    std::vector<double> column;
    std::vector<double> device_current;  // column -> row
};

// Full nodal analysis over r0 and every column node. Undriven sources sit
// at 0 V; relays are plain resistors.
inline RowSolution nodal_row(const std::vector<double>& r_device, const std::vector<std::optional<double>>& drive,
                             const std::vector<bool>& switch_closed, bool row_closed, double r_open = 1e12,
                             double r_closed = 1.0) {
    const std::size_t n = r_device.size();
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
    std::vector<double> b(n + 1, 0.0);
    const double g_row = 1.0 / (row_closed ? r_closed : r_open);
    a[0][0] += g_row;
    for (std::size_t i = 0; i < n; ++i) {
        const double gd = 1.0 / r_device[i];
        const double gs = 1.0 / (switch_closed[i] ? r_closed : r_open);
        const double e = drive[i].value_or(0.0);
        const std::size_t c = i + 1;
        a[c][c] += gd + gs;
        a[c][0] -= gd;
        a[0][0] += gd;
        a[0][c] -= gd;
        b[c] += gs * e;
    }
    const auto x = solve_dense(a, b);
    RowSolution s;
    s.v_row = x[0];
    for (std::size_t i = 0; i < n; ++i) {
        s.column.push_back(x[i + 1]);
        s.device_current.push_back((x[i + 1] - x[0]) / r_device[i]);
    }
    return s;
}

// Minimal VTEAM (linear I-V, hard clamp) integrator for cross-checks.
struct Vteam {
    double v_set, v_reset, k_set, k_reset, a_set, a_reset, w_min, w_max, r_on, r_off;

    double resistance(double w) const { return r_on + (r_off - r_on) * (w_max - w) / (w_max - w_min); }
    double rate(double v) const {
        if (v >= v_set) return k_set * std::pow(v / v_set - 1.0, a_set);
        if (v <= v_reset) return k_reset * std::pow(v / v_reset - 1.0, a_reset);
        return 0.0;
    }
    double step(double w, double v, double dt) const { return std::clamp(w + rate(v) * dt, w_min, w_max); }
    double hold(double w, double v, double duration, double dt) const {
        const auto steps = static_cast<long>(std::llround(duration / dt));
        for (long s = 0; s < steps; ++s) w = step(w, v, dt);
        return w;
    }
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("magicsim_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
