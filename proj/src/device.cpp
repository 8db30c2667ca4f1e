#include "magicsim/device.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "magicsim/error.hpp"
#include "magicsim/format.hpp"
#include "magicsim/keyvalue.hpp"

namespace magicsim {

namespace {

// (x)^alpha for x >= 0 with a multiply-only path for small integer exponents.
double threshold_power(double x, double alpha) {
    if (alpha == 3.0) return x * x * x;
    if (alpha == 1.0) return x;
    if (alpha == 2.0) return x * x;
    return std::pow(x, alpha);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr int kVariationRetries = 64;

}  // namespace

bool VariationSpec::enabled() const {
    return std::any_of(sigma.begin(), sigma.end(), [](const auto& kv) { return kv.second > 0.0; });
}

std::string check_params(const VteamParams& p) {
    if (!(p.r_on > 0.0)) return "r_on must be positive";
    if (!(p.r_on < p.r_off)) return "r_on must be below r_off";
    if (!(p.w_min < p.w_max)) return "w_min must be below w_max";
    if (!(p.v_reset < 0.0 && p.v_set > 0.0)) return "thresholds must satisfy v_reset < 0 < v_set";
    if (!(p.k_set > 0.0)) return "k_set must be positive";
    if (!(p.k_reset < 0.0)) return "k_reset must be negative";
    if (!(p.alpha_set >= 1.0 && p.alpha_reset >= 1.0)) return "alpha exponents must be at least 1";
    return {};
}

void require_valid(const VteamParams& p) {
    if (auto msg = check_params(p); !msg.empty()) throw ConfigError("invalid device parameters: " + msg);
}

double resistance(MemristorState s, const VteamParams& p) {
    return p.r_on + (p.r_off - p.r_on) * (p.w_max - s.w) / (p.w_max - p.w_min);
}

double current(double v, MemristorState s, const VteamParams& p) { return v / resistance(s, p); }

double state_derivative(double v, MemristorState, const VteamParams& p) {
    if (v >= p.v_set) return p.k_set * threshold_power(v / p.v_set - 1.0, p.alpha_set);
    if (v <= p.v_reset) return p.k_reset * threshold_power(v / p.v_reset - 1.0, p.alpha_reset);
    return 0.0;
}

MemristorState step_state(MemristorState s, double v, double dt, const VteamParams& p) {
    const double rate = state_derivative(v, s, p);
    if (rate == 0.0) return s;
    return MemristorState{std::clamp(s.w + rate * dt, p.w_min, p.w_max)};
}

bool to_logic(MemristorState s, const VteamParams& p) {
    return resistance(s, p) <= logic_threshold_resistance(p);
}

VteamParams sample_varied_params(const VteamParams& nominal, const VariationSpec& spec, std::size_t device_index) {
    for (const auto& [name, sigma] : spec.sigma) {
        bool known = std::any_of(kParamFields.begin(), kParamFields.end(),
                                 [&](const ParamField& f) { return name == f.name; });
        if (!known) throw ConfigError("variation names unknown parameter '" + name + "'");
        if (!(sigma >= 0.0)) throw ConfigError("variation sigma for '" + name + "' must be >= 0");
    }
    if (!spec.enabled()) return nominal;

    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(device_index))));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < kVariationRetries; ++attempt) {
        VteamParams p = nominal;
        for (const auto& f : kParamFields) {
            const double z = normal(rng);
            auto it = spec.sigma.find(f.name);
            if (it == spec.sigma.end() || it->second == 0.0) continue;
            const double mean = nominal.*f.member;
            p.*f.member = mean + it->second * std::fabs(mean) * z;
        }
        if (check_params(p).empty()) return p;
    }
    throw ConfigError("variation sampling for device " + std::to_string(device_index) +
                      " kept violating parameter invariants after " + std::to_string(kVariationRetries) + " draws");
}

VteamParams default_params() {
    // Output of calibrate_params(CalibrationTargets{}); regenerate with
    // `magicsim calibrate` and keep presets/vteam_default.params in sync.
    VteamParams p;
    p.v_set = 1.2;
    p.v_reset = -0.3;
    p.k_set = 15.576923076923345;
    p.k_reset = -15.576923076923345;
    p.alpha_set = 3.0;
    p.alpha_reset = 3.0;
    p.w_min = 0.0;
    p.w_max = 3e-9;
    p.r_on = 10e3;
    p.r_off = 1e6;
    return p;
}

VteamParams parse_params(std::string_view text, std::string_view origin) {
    VteamParams p = default_params();
    for (const auto& kv : parse_key_values(text, origin)) {
        auto it = std::find_if(kParamFields.begin(), kParamFields.end(),
                               [&](const ParamField& f) { return kv.key == f.name; });
        if (it == kParamFields.end())
            throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) + ": unknown parameter '" + kv.key + "'");
        p.*(it->member) = to_double(kv, origin);
    }
    require_valid(p);
    return p;
}

VteamParams load_params(const std::string& name_or_path) {
    if (name_or_path.empty() || name_or_path == "default") return default_params();
    return parse_params(read_text_file(name_or_path), name_or_path);
}

std::string render_params(const VteamParams& p) {
    std::string out;
    // Shortest round-trip form so a preset reproduces the exact doubles.
    for (const auto& f : kParamFields) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, p.*f.member);
        out += std::string(f.name) + " = " + std::string(buf, res.ptr) + "\n";
    }
    return out;
}

double switching_time(const VteamParams& p, double v, double dt, double max_time) {
    const bool setting = v > 0.0;
    MemristorState s{setting ? p.w_min : p.w_max};
    const double target = setting ? p.w_max : p.w_min;
    const auto max_steps = static_cast<long long>(std::floor(max_time / dt + 1e-9));
    for (long long n = 1; n <= max_steps; ++n) {
        s = step_state(s, v, dt, p);
        if (s.w == target) return static_cast<double>(n) * dt;
    }
    return -1.0;
}

VteamParams calibrate_params(const CalibrationTargets& t, const VteamParams& base) {
    VteamParams p = base;
    p.v_set = t.v_set;
    p.v_reset = t.v_reset;
    p.alpha_set = t.alpha;
    p.alpha_reset = t.alpha;
    p.k_set = 1.0;
    p.k_reset = -1.0;
    const double budget = t.settle_fraction * t.pulse_width;

    // Smallest |k| whose Euler transient completes inside the budget.
    auto solve = [&](double VteamParams::*k, double sign, double v) {
        double lo = 1e-6;
        double hi = 1e9;
        for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
            const double mid = std::sqrt(lo * hi);
            p.*k = sign * mid;
            const double ts = switching_time(p, v, t.dt, budget);
            if (ts > 0.0) hi = mid;
            else lo = mid;
        }
        p.*k = sign * hi;
    };
    solve(&VteamParams::k_set, 1.0, t.set_voltage);
    solve(&VteamParams::k_reset, -1.0, t.reset_voltage);
    require_valid(p);
    return p;
}

}  // namespace magicsim
