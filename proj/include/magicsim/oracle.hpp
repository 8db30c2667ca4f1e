#pragma once

// Logic-level golden model of an execution plan and the harness that
// checks simulated runs against it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "magicsim/device.hpp"
#include "magicsim/error.hpp"
#include "magicsim/mapping_ir.hpp"
#include "magicsim/schedule.hpp"
#include "magicsim/sim.hpp"

namespace magicsim {

class EmulationError : public Error {
public:
    using Error::Error;
};

// Undefined marks a device no input, Init or gate has touched.
struct LogicState {
    std::vector<std::optional<bool>> bits;
};

struct Emulation {
    LogicState final;
    std::vector<LogicState> per_cycle;  // state after each sequence entry
};

Emulation emulate(const ExecutionPlan& plan, const InputPattern& pattern, bool keep_log = false);
std::vector<std::uint8_t> expected_outputs(const ExecutionPlan& plan, const InputPattern& pattern);

struct OutputCheck {
    std::string name;
    std::size_t device;
    bool expected;
    bool simulated;  // final device state
    bool sensed;     // read-phase measurement
    bool match;
};

struct VerificationReport {
    std::vector<OutputCheck> outputs;
    bool pass = true;
};

VerificationReport verify_run(const ExecutionPlan& plan, const InputPattern& pattern, const SimTrace& trace);
std::string verification_json(const VerificationReport& report, const InputPattern& pattern);

using ReferenceFn = std::function<std::vector<std::uint8_t>(std::span<const std::uint8_t>)>;

// Reference read from lines of `inputbits outputbits`.
ReferenceFn parse_truth_table(std::string_view text);

struct SweepOptions {
    std::size_t max_exhaustive_inputs = 16;
    std::size_t random_samples = 256;
    std::uint64_t seed = 1;
    bool simulate = false;
    // Used only when simulate is set.
    std::vector<VteamParams> params;
    SimOptions sim;
    TimingConfig timing;
    VoltageConfig volts;
};

struct SweepReport {
    std::size_t tested = 0;
    std::size_t passed = 0;
    bool exhaustive = false;
    std::vector<std::string> failing_patterns;

    bool all_passed() const { return tested == passed; }
};

SweepReport truth_table_sweep(const ExecutionPlan& plan, const ReferenceFn& reference, const SweepOptions& opts = {});

}  // namespace magicsim
