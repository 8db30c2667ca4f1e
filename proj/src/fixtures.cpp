#include "magicsim/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "magicsim/error.hpp"

namespace magicsim::fixtures {

namespace {

const std::string kHalfAdder = R"({
"Row size": 5,
"Number of Gates": 5,
"Inputs": "{A(0),B(1)}",
"Outputs": "{S(4),Cy(2)}",
"Reuse cycles": 1,
"Execution sequence": {
"T0": "Init{'D(2)','D(3)','D(4)'}",
"T1": "n5_(4)=inv1{A(0)}",
"T2": "n6_(3)=inv1{B(1)}",
"T3": "Cy(2)=nor2{n6_(3),n5_(4)}",
"T4": "Init{n5_(4),n6_(3)}",
"T5": "n8_(3)=nor2{B(1),A(0)}",
"T6": "S(4)=nor2{n8_(3),Cy(2)}"}
}
)";

// c17 is six NAND2 gates. Each NAND becomes NOR of inverted operands
// followed by a NOT where a true-polarity value is needed.
const std::string kC17 = R"({
"Row size": 18,
"Number of Gates": 13,
"Inputs": "{N1(0),N2(1),N3(2),N6(3),N7(4)}",
"Outputs": "{N22(16),N23(17)}",
"Reuse cycles": 0,
"Execution sequence": {
"T0": "Init{'D(5)','D(6)','D(7)','D(8)','D(9)','D(10)','D(11)','D(12)','D(13)','D(14)','D(15)','D(16)','D(17)'}",
"T1": "a1_(5)=inv1{N1(0)}",
"T2": "a2_(6)=inv1{N2(1)}",
"T3": "a3_(7)=inv1{N3(2)}",
"T4": "a6_(8)=inv1{N6(3)}",
"T5": "a7_(9)=inv1{N7(4)}",
"T6": "m10_(10)=nor2{a1_(5),a3_(7)}",
"T7": "m11_(11)=nor2{a3_(7),a6_(8)}",
"T8": "m16_(12)=nor2{a2_(6),m11_(11)}",
"T9": "m19_(13)=nor2{m11_(11),a7_(9)}",
"T10": "p22_(14)=nor2{m10_(10),m16_(12)}",
"T11": "p23_(15)=nor2{m16_(12),m19_(13)}",
"T12": "N22(16)=inv1{p22_(14)}",
"T13": "N23(17)=inv1{p23_(15)}"}
}
)";

SignalRef ref(std::string name, std::size_t device) { return SignalRef{std::move(name), device}; }

std::string label(std::size_t k) { return "T" + std::to_string(k); }

void finish_counts(ExecutionPlan& plan) {
    const GateCounts c = count_ops(plan);
    plan.num_gates = c.nots + c.nors;
    plan.reuse_cycles = c.reinits;
}

enum class Cell { Input, Free, Armed, Data };

ExecutionPlan generate(std::mt19937_64& rng, std::size_t n, std::size_t cycles, std::size_t max_inputs,
                       std::size_t max_outputs) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    ExecutionPlan plan;
    plan.row_size = n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t pi = pick(1, std::min(max_inputs, n - 2));
    std::vector<Cell> cell(n, Cell::Free);
    for (std::size_t k = 0; k < pi; ++k) {
        plan.inputs.push_back(ref("x" + std::to_string(k), order[k]));
        cell[order[k]] = Cell::Input;
    }

    auto devices_in = [&](Cell c) {
        std::vector<std::size_t> out;
        for (std::size_t d = 0; d < n; ++d)
            if (cell[d] == c) out.push_back(d);
        return out;
    };
    auto init_subset = [&](std::vector<std::size_t> candidates) {
        InitOp op;
        for (auto d : candidates)
            if (chance(0.5)) op.targets.push_back(ref("D", d));
        if (op.targets.empty()) op.targets.push_back(ref("D", candidates[pick(0, candidates.size() - 1)]));
        for (const auto& t : op.targets) cell[t.device] = Cell::Armed;
        return op;
    };

    std::vector<std::size_t> non_inputs;
    for (std::size_t d = 0; d < n; ++d)
        if (cell[d] != Cell::Input) non_inputs.push_back(d);
    plan.sequence.push_back({label(0), init_subset(non_inputs)});

    std::size_t gate_no = 0;
    for (std::size_t k = 1; k < cycles; ++k) {
        const auto armed = devices_in(Cell::Armed);
        std::vector<std::size_t> reinit_pool;
        for (auto d : non_inputs)
            if (cell[d] != Cell::Armed) reinit_pool.push_back(d);
        const bool gate = !armed.empty() && (reinit_pool.empty() || chance(0.8));
        if (!gate) {
            plan.sequence.push_back({label(k), init_subset(reinit_pool)});
            continue;
        }
        std::vector<std::size_t> sources = devices_in(Cell::Input);
        for (auto d : devices_in(Cell::Data)) sources.push_back(d);
        const std::size_t out = armed[pick(0, armed.size() - 1)];
        SignalRef out_ref = ref("g" + std::to_string(gate_no++) + "_", out);
        auto source_ref = [&](std::size_t d) {
            if (cell[d] == Cell::Input) {
                for (const auto& in : plan.inputs)
                    if (in.device == d) return in;
            }
            return ref("d" + std::to_string(d) + "_", d);
        };
        if (sources.size() < 2 || chance(0.4)) {
            plan.sequence.push_back({label(k), NotOp{source_ref(sources[pick(0, sources.size() - 1)]), out_ref}});
        } else {
            const std::size_t a = pick(0, sources.size() - 1);
            std::size_t b = pick(0, sources.size() - 2);
            if (b >= a) ++b;
            plan.sequence.push_back({label(k), NorOp{source_ref(sources[a]), source_ref(sources[b]), out_ref}});
        }
        cell[out] = Cell::Data;
    }

    auto data = devices_in(Cell::Data);
    std::shuffle(data.begin(), data.end(), rng);
    const std::size_t po = data.empty() ? 0 : pick(1, std::min(max_outputs, data.size()));
    for (std::size_t k = 0; k < po; ++k) plan.outputs.push_back(ref("y" + std::to_string(k), data[k]));
    finish_counts(plan);
    return plan;
}

}  // namespace

const std::string& half_adder_json() { return kHalfAdder; }

ExecutionPlan half_adder() { return parse_plan(kHalfAdder); }

std::vector<std::uint8_t> half_adder_reference(std::span<const std::uint8_t> in) {
    const bool a = in[0] != 0, b = in[1] != 0;
    return {static_cast<std::uint8_t>(a != b), static_cast<std::uint8_t>(a && b)};
}

const std::string& c17_json() { return kC17; }

ExecutionPlan c17() { return parse_plan(kC17); }

std::vector<std::uint8_t> c17_reference(std::span<const std::uint8_t> in) {
    auto nand = [](bool x, bool y) { return !(x && y); };
    const bool n1 = in[0], n2 = in[1], n3 = in[2], n6 = in[3], n7 = in[4];
    const bool n10 = nand(n1, n3);
    const bool n11 = nand(n3, n6);
    const bool n16 = nand(n2, n11);
    const bool n19 = nand(n11, n7);
    return {static_cast<std::uint8_t>(nand(n10, n16)), static_cast<std::uint8_t>(nand(n16, n19))};
}

ExecutionPlan magic_not() {
    ExecutionPlan p;
    p.row_size = 2;
    p.inputs = {ref("A", 0)};
    p.outputs = {ref("Y", 1)};
    p.sequence = {{"T0", InitOp{{ref("D", 1)}}}, {"T1", NotOp{ref("A", 0), ref("Y", 1)}}};
    finish_counts(p);
    return p;
}

ExecutionPlan magic_nor() {
    ExecutionPlan p;
    p.row_size = 3;
    p.inputs = {ref("A", 0), ref("B", 1)};
    p.outputs = {ref("Y", 2)};
    p.sequence = {{"T0", InitOp{{ref("D", 2)}}}, {"T1", NorOp{ref("A", 0), ref("B", 1), ref("Y", 2)}}};
    finish_counts(p);
    return p;
}

ExecutionPlan padded_half_adder(std::size_t row_size) {
    ExecutionPlan p = half_adder();
    if (row_size < p.row_size) throw ConfigError("row size " + std::to_string(row_size) + " is smaller than the half adder");
    p.row_size = row_size;
    auto& init = std::get<InitOp>(p.sequence.front().op);
    for (std::size_t d = 5; d < row_size; ++d) init.targets.push_back(ref("D", d));
    return p;
}

ExecutionPlan random_plan(std::uint64_t seed, const RandomPlanOptions& opts) {
    if (opts.min_devices < 3 || opts.max_devices < opts.min_devices || opts.min_cycles < 2 ||
        opts.max_cycles < opts.min_cycles)
        throw ConfigError("random plan bounds need at least 3 devices and 2 cycles");
    std::mt19937_64 rng(seed);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(opts.min_devices, opts.max_devices)(rng);
    const std::size_t cycles = std::uniform_int_distribution<std::size_t>(opts.min_cycles, opts.max_cycles)(rng);
    return generate(rng, n, cycles, std::max<std::size_t>(opts.max_inputs, 1), std::max<std::size_t>(opts.max_outputs, 1));
}

ExecutionPlan synthetic_plan(std::size_t devices, std::size_t cycles, std::uint64_t seed) {
    if (devices < 3 || cycles < 2) throw ConfigError("synthetic plan needs at least 3 devices and 2 cycles");
    std::mt19937_64 rng(seed);
    return generate(rng, devices, cycles, 32, 16);
}

}  // namespace magicsim::fixtures
