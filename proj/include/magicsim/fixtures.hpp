#pragma once

// Known plans and plan generators used by tests, benchmarks and the
// `fixtures` subcommand.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "magicsim/mapping_ir.hpp"

namespace magicsim::fixtures {

// Five-device half adder, S = A xor B, Cy = A and B.
const std::string& half_adder_json();
ExecutionPlan half_adder();
std::vector<std::uint8_t> half_adder_reference(std::span<const std::uint8_t> in);

// ISCAS-85 c17 rewritten as NOT/NOR over 18 devices.
const std::string& c17_json();
ExecutionPlan c17();
std::vector<std::uint8_t> c17_reference(std::span<const std::uint8_t> in);

// Single gates: NOT is {in@0, out@1}, NOR is {a@0, b@1, out@2}.
ExecutionPlan magic_not();
ExecutionPlan magic_nor();

// The half adder on a wider row; T0 also initializes every unused device.
ExecutionPlan padded_half_adder(std::size_t row_size);

struct RandomPlanOptions {
    std::size_t min_devices = 3;
    std::size_t max_devices = 64;
    std::size_t min_cycles = 2;
    std::size_t max_cycles = 100;
    std::size_t max_inputs = 6;
    std::size_t max_outputs = 4;
};

// A plan obeying the MAGIC write discipline: every gate output was Init'd
// since its last write and every operand holds an input or a gate result.
ExecutionPlan random_plan(std::uint64_t seed, const RandomPlanOptions& opts = {});

// Fixed-size variant used for scale runs.
ExecutionPlan synthetic_plan(std::size_t devices, std::size_t cycles, std::uint64_t seed);

}  // namespace magicsim::fixtures
