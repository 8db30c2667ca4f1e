#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "magicsim/mapping_ir.hpp"

namespace magicsim {

struct TimingConfig {
    double pulse_width = 1.3e-9;
    double rise = 1e-12;
    double fall = 1e-12;
    double gap = 0.5e-9;

    double cycle_period() const { return rise + pulse_width + fall + gap; }
};

struct VoltageConfig {
    double v_input = 2.0;
    double v_init = 2.0;
    double v_op = 1.0;
    double v_read = 0.2;
    double v_switch_on = 2.0;
    double v_switch_off = 0.0;
};

void require_valid(const TimingConfig& t);
void require_valid(const VoltageConfig& v);

struct WavePoint {
    double t;
    double v;
    bool operator==(const WavePoint&) const = default;
};

// Piecewise-linear waveform; times strictly increasing from t = 0.
struct Waveform {
    std::vector<WavePoint> points;

    double value_at(double t) const;
    bool operator==(const Waveform&) const = default;
};

// Appends trapezoidal pulses on top of a constant base level.
class WaveformBuilder {
public:
    WaveformBuilder(const TimingConfig& timing, double base);

    // Pulse starting at t0: ramp to level over rise, hold pulse_width, ramp
    // back over fall. A pulse at the base level adds nothing.
    WaveformBuilder& pulse(double t0, double level);
    Waveform finish(double total_time);
    Waveform finish();

private:
    void append(double t, double v);

    TimingConfig timing_;
    double base_;
    Waveform wave_;
};

// Monotone sampler for stepping through a waveform in time order.
class WaveformCursor {
public:
    explicit WaveformCursor(const Waveform& w) : w_(&w) {}
    double at(double t);

private:
    const Waveform* w_;
    std::size_t seg_ = 0;
};

enum class PhaseKind : std::uint8_t { Load, Init, Reinit, Exec, Read };
inline constexpr std::size_t kPhaseKinds = 5;
const char* to_string(PhaseKind kind);

struct PhaseWindow {
    PhaseKind kind;
    std::size_t cycle_index;
    double t_start;
    double t_end;
    std::vector<std::size_t> touched_devices;
    std::string label;
};

struct InputPattern {
    std::vector<std::uint8_t> bits;
    std::string name;
};

enum class PatternKind { AllZeros, AllOnes, Alternating };

InputPattern make_pattern(PatternKind kind, std::size_t n_inputs);
// "I1" | "I2" | "I3" | a bit string with one character per input ("10").
InputPattern parse_pattern(std::string_view text, std::size_t n_inputs);
std::string pattern_bits(const InputPattern& p);

struct Schedule {
    std::size_t n_columns = 0;
    TimingConfig timing;
    VoltageConfig volts;
    std::vector<PhaseWindow> phases;
    std::vector<Waveform> column_waveforms;
    Waveform row_ground_switch_waveform;
    std::vector<Waveform> column_switch_waveforms;
    double total_time = 0.0;
};

Schedule build_schedule(const ExecutionPlan& plan, const InputPattern& pattern,
                        const TimingConfig& timing = {}, const VoltageConfig& volts = {});

std::string render_pwl(const Waveform& waveform);

}  // namespace magicsim
