#pragma once

// Execution-plan IR for single-row MAGIC mappings.
//
// A plan is read from the JSON emitted by a SIMPLER-style mapper:
//
//   "Row size": 5,
//   "Inputs": "{A(0),B(1)}",
//   "Execution sequence": { "T0": "Init{'D(2)','D(3)'}",
//                           "T1": "n5_(4)=inv1{A(0)}", ... }
//
// Sequence entries are ordered by the numeric suffix of their T-label and
// must be dense from T0.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "magicsim/error.hpp"

namespace magicsim {

struct SignalRef {
    std::string name;
    std::size_t device = 0;

    bool operator==(const SignalRef&) const = default;
};

struct InitOp {
    std::vector<SignalRef> targets;
    bool operator==(const InitOp&) const = default;
};

struct NotOp {
    SignalRef input;
    SignalRef output;
    bool operator==(const NotOp&) const = default;
};

struct NorOp {
    SignalRef input_a;
    SignalRef input_b;
    SignalRef output;
    bool operator==(const NorOp&) const = default;
};

using MicroOp = std::variant<InitOp, NotOp, NorOp>;

struct SequenceEntry {
    std::string label;
    MicroOp op;
    bool operator==(const SequenceEntry&) const = default;
};

struct ExecutionPlan {
    std::size_t row_size = 0;
    std::size_t num_gates = 0;
    std::vector<SignalRef> inputs;
    std::vector<SignalRef> outputs;
    std::size_t reuse_cycles = 0;
    std::vector<SequenceEntry> sequence;

    bool operator==(const ExecutionPlan&) const = default;
};

enum class ViolationKind {
    IndexOutOfRange,
    OutputNotInitialized,
    OperandUndefined,
    OperandIsOutput,
    CountMismatch,
    OutputNeverWritten,
};

const char* to_string(ViolationKind kind);

struct PlanViolation {
    std::string cycle_label;
    ViolationKind kind;
    std::string detail;
};

// Thrown by parse_plan when a plan references a device outside the row.
class PlanError : public Error {
public:
    PlanError(ViolationKind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    ViolationKind kind() const noexcept { return kind_; }

private:
    ViolationKind kind_;
};

ExecutionPlan parse_plan(std::string_view json_text);
MicroOp parse_micro_op(std::string_view text, std::string_view label = {});
std::vector<PlanViolation> validate_plan(const ExecutionPlan& plan);

// Canonical text forms; parse_micro_op(render_micro_op(op)) == op.
std::string render_micro_op(const MicroOp& op);
std::string render_plan_json(const ExecutionPlan& plan);

// Devices an op reads and the device it writes (none for Init).
std::vector<std::size_t> op_operands(const MicroOp& op);
std::vector<std::size_t> op_devices(const MicroOp& op);

struct GateCounts {
    std::size_t nots = 0;
    std::size_t nors = 0;
    std::size_t inits = 0;
    std::size_t reinits = 0;
};

GateCounts count_ops(const ExecutionPlan& plan);

}  // namespace magicsim
