#include "magicsim/mapping_ir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

namespace magicsim {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_delimiter(char c) {
    switch (c) {
        case '(': case ')': case '{': case '}': case ',': case '=': case '\'': case '"':
            return true;
        default:
            return std::isspace(static_cast<unsigned char>(c)) != 0;
    }
}

// Recursive-descent reader over one micro-op string.
class OpReader {
public:
    OpReader(std::string_view text, std::string_view label) : s_(text), label_(label) {}

    MicroOp read_op() {
        skip_ws();
        const std::size_t start = pos_;
        std::string_view word = peek_name();
        if (word == "Init") {
            std::size_t save = pos_;
            pos_ += word.size();
            skip_ws();
            if (peek() == '{') {
                InitOp op{read_list(0)};
                if (op.targets.empty()) fail(start, "Init requires at least one target");
                finish();
                return op;
            }
            pos_ = save;
        }
        SignalRef out = read_item();
        skip_ws();
        expect('=', "expected '=' after output operand");
        skip_ws();
        const std::size_t mnem_at = pos_;
        std::string mnemonic(peek_name());
        if (mnemonic.empty()) fail(mnem_at, "missing op mnemonic");
        pos_ += mnemonic.size();
        skip_ws();
        std::size_t arity = 0;
        if (mnemonic == "inv1") {
            arity = 1;
        } else if (mnemonic == "nor2") {
            arity = 2;
        } else {
            fail(mnem_at, "unknown op mnemonic '" + mnemonic + "'");
        }
        const std::size_t list_at = pos_;
        auto operands = read_list(arity);
        if (operands.size() != arity) {
            fail(list_at, mnemonic + " takes " + std::to_string(arity) + " operand(s), got " +
                              std::to_string(operands.size()));
        }
        finish();
        if (arity == 1) return NotOp{operands[0], out};
        return NorOp{operands[0], operands[1], out};
    }

    // "{item,item,...}" with an empty list permitted.
    std::vector<SignalRef> read_list(std::size_t /*arity hint*/) {
        std::vector<SignalRef> items;
        skip_ws();
        expect('{', "expected '{'");
        skip_ws();
        if (peek() == '}') {
            ++pos_;
            return items;
        }
        for (;;) {
            items.push_back(read_item());
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == '}') {
                ++pos_;
                break;
            }
            fail(pos_, "unbalanced braces");
        }
        return items;
    }

    void finish() {
        skip_ws();
        if (pos_ != s_.size()) fail(pos_, "trailing characters");
    }

    bool at_end() {
        skip_ws();
        return pos_ == s_.size();
    }

private:
    SignalRef read_item() {
        skip_ws();
        const std::size_t start = pos_;
        char quote = 0;
        if (peek() == '\'' || peek() == '"') quote = s_[pos_++];
        std::string_view name = peek_name();
        if (name.empty()) fail(start, "missing signal name");
        pos_ += name.size();
        skip_ws();
        expect('(', "expected '(' after signal name");
        skip_ws();
        const std::size_t idx_at = pos_;
        while (pos_ < s_.size() && s_[pos_] != ')' && s_[pos_] != '}' && s_[pos_] != ',') ++pos_;
        if (pos_ >= s_.size() || s_[pos_] != ')') fail(start, "unbalanced parentheses");
        std::string_view idx_text = s_.substr(idx_at, pos_ - idx_at);
        while (!idx_text.empty() && std::isspace(static_cast<unsigned char>(idx_text.back())))
            idx_text.remove_suffix(1);
        std::size_t device = 0;
        auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), device);
        if (idx_text.empty() || ec != std::errc() || ptr != idx_text.data() + idx_text.size())
            fail(idx_at, "non-integer index '" + std::string(idx_text) + "'");
        ++pos_;  // ')'
        if (quote != 0) {
            skip_ws();
            if (peek() != quote) fail(start, "unterminated quote");
            ++pos_;
        }
        return SignalRef{std::string(name), device};
    }

    std::string_view peek_name() const {
        std::size_t end = pos_;
        while (end < s_.size() && !is_delimiter(s_[end])) ++end;
        return s_.substr(pos_, end - pos_);
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    void expect(char c, const std::string& msg) {
        if (peek() != c) {
            if (c == '}' || c == '{') fail(pos_, "unbalanced braces: " + msg);
            fail(pos_, msg);
        }
        ++pos_;
    }

    [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
        std::size_t len = std::min<std::size_t>(s_.size() - std::min(at, s_.size()), 16);
        throw GrammarError(std::string(label_), std::string(s_.substr(std::min(at, s_.size()), len)), msg);
    }

    std::string_view s_;
    std::string_view label_;
    std::size_t pos_ = 0;
};

std::vector<SignalRef> parse_signal_list(std::string_view text, std::string_view key) {
    OpReader reader(text, key);
    if (reader.at_end()) return {};
    auto items = reader.read_list(0);
    reader.finish();
    return items;
}

std::string render_ref(const SignalRef& r) {
    return r.name + "(" + std::to_string(r.device) + ")";
}

std::string render_list(const std::vector<SignalRef>& refs) {
    std::string out = "{";
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i) out += ",";
        out += render_ref(refs[i]);
    }
    return out + "}";
}

std::size_t require_count(const nlohmann::json& obj, const char* key, bool required, std::size_t fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw SchemaError(std::string("missing required key \"") + key + "\"");
        return fallback;
    }
    if (!it->is_number_integer() || it->get<long long>() < 0)
        throw SchemaError(std::string("\"") + key + "\" must be a non-negative integer");
    return it->get<std::size_t>();
}

std::vector<SignalRef> optional_list(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw SchemaError(std::string("\"") + key + "\" must be a string like \"{A(0),B(1)}\"");
    return parse_signal_list(it->get<std::string>(), key);
}

}  // namespace

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::IndexOutOfRange: return "IndexOutOfRange";
        case ViolationKind::OutputNotInitialized: return "OutputNotInitialized";
        case ViolationKind::OperandUndefined: return "OperandUndefined";
        case ViolationKind::OperandIsOutput: return "OperandIsOutput";
        case ViolationKind::CountMismatch: return "CountMismatch";
        case ViolationKind::OutputNeverWritten: return "OutputNeverWritten";
    }
    return "?";
}

MicroOp parse_micro_op(std::string_view text, std::string_view label) {
    OpReader reader(text, label);
    MicroOp op = reader.read_op();
    if (auto* init = std::get_if<InitOp>(&op)) {
        std::set<std::size_t> seen;
        for (const auto& t : init->targets) {
            if (!seen.insert(t.device).second)
                throw GrammarError(std::string(label), render_ref(t), "duplicate Init target device");
        }
    }
    return op;
}

std::vector<std::size_t> op_operands(const MicroOp& op) {
    if (auto* n = std::get_if<NotOp>(&op)) return {n->input.device};
    if (auto* n = std::get_if<NorOp>(&op)) return {n->input_a.device, n->input_b.device};
    return {};
}

std::vector<std::size_t> op_devices(const MicroOp& op) {
    std::vector<std::size_t> out;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, InitOp>) {
                for (const auto& t : o.targets) out.push_back(t.device);
            } else if constexpr (std::is_same_v<T, NotOp>) {
                out = {o.input.device, o.output.device};
            } else {
                out = {o.input_a.device, o.input_b.device, o.output.device};
            }
        },
        op);
    return out;
}

std::string render_micro_op(const MicroOp& op) {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, InitOp>) {
                return "Init" + render_list(o.targets);
            } else if constexpr (std::is_same_v<T, NotOp>) {
                return render_ref(o.output) + "=inv1{" + render_ref(o.input) + "}";
            } else {
                return render_ref(o.output) + "=nor2{" + render_ref(o.input_a) + "," + render_ref(o.input_b) + "}";
            }
        },
        op);
}

GateCounts count_ops(const ExecutionPlan& plan) {
    GateCounts c;
    for (std::size_t k = 0; k < plan.sequence.size(); ++k) {
        const auto& op = plan.sequence[k].op;
        if (std::holds_alternative<NotOp>(op)) ++c.nots;
        else if (std::holds_alternative<NorOp>(op)) ++c.nors;
        else if (k == 0) ++c.inits;
        else ++c.reinits;
    }
    return c;
}

ExecutionPlan parse_plan(std::string_view json_text) {
    // A bare member list (no enclosing braces) is accepted as an object body.
    std::size_t first = 0;
    while (first < json_text.size() && std::isspace(static_cast<unsigned char>(json_text[first]))) ++first;
    const bool bare = first < json_text.size() && json_text[first] == '"';
    std::string wrapped;
    if (bare) wrapped = "{" + std::string(json_text) + "}";

    nlohmann::json doc;
    try {
        doc = bare ? nlohmann::json::parse(wrapped) : nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t off = e.byte;
        if (bare && off > 0) --off;
        throw ParseError("malformed JSON: " + std::string(e.what()), off);
    }
    if (!doc.is_object()) throw SchemaError("mapping must be a JSON object");

    ExecutionPlan plan;
    plan.row_size = require_count(doc, "Row size", true, 0);
    if (plan.row_size == 0) throw SchemaError("\"Row size\" must be at least 1");
    auto seq_it = doc.find("Execution sequence");
    if (seq_it == doc.end()) throw SchemaError("missing required key \"Execution sequence\"");
    if (!seq_it->is_object()) throw SchemaError("\"Execution sequence\" must be an object");

    plan.inputs = optional_list(doc, "Inputs");
    plan.outputs = optional_list(doc, "Outputs");

    std::map<std::size_t, SequenceEntry> ordered;
    for (auto it = seq_it->begin(); it != seq_it->end(); ++it) {
        const std::string& key = it.key();
        std::size_t k = 0;
        auto [ptr, ec] = std::from_chars(key.data() + std::min<std::size_t>(1, key.size()), key.data() + key.size(), k);
        if (key.size() < 2 || key[0] != 'T' || ec != std::errc() || ptr != key.data() + key.size())
            throw SchemaError("sequence label \"" + key + "\" is not of the form T<k>");
        if (!it.value().is_string()) throw SchemaError("sequence entry \"" + key + "\" must be a string");
        if (ordered.count(k)) throw SchemaError("duplicate sequence index in \"" + key + "\"");
        ordered.emplace(k, SequenceEntry{key, parse_micro_op(it.value().get<std::string>(), key)});
    }
    std::size_t expect = 0;
    for (auto& [k, entry] : ordered) {
        if (k != expect)
            throw SchemaError("sequence labels must be dense from T0; T" + std::to_string(expect) + " is missing");
        plan.sequence.push_back(std::move(entry));
        ++expect;
    }

    GateCounts counts = count_ops(plan);
    plan.num_gates = require_count(doc, "Number of Gates", false, counts.nots + counts.nors);
    plan.reuse_cycles = require_count(doc, "Reuse cycles", false, counts.reinits);

    auto check_bounds = [&](const SignalRef& r, const std::string& where) {
        if (r.device >= plan.row_size)
            throw PlanError(ViolationKind::IndexOutOfRange,
                            where + ": device " + std::to_string(r.device) + " of '" + r.name +
                                "' is outside a row of " + std::to_string(plan.row_size));
    };
    for (const auto& r : plan.inputs) check_bounds(r, "Inputs");
    for (const auto& r : plan.outputs) check_bounds(r, "Outputs");
    for (const auto& e : plan.sequence) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, InitOp>) {
                    for (const auto& t : o.targets) check_bounds(t, e.label);
                } else if constexpr (std::is_same_v<T, NotOp>) {
                    check_bounds(o.input, e.label);
                    check_bounds(o.output, e.label);
                } else {
                    check_bounds(o.input_a, e.label);
                    check_bounds(o.input_b, e.label);
                    check_bounds(o.output, e.label);
                }
            },
            e.op);
    }
    auto check_distinct = [](const std::vector<SignalRef>& refs, const char* what) {
        std::set<std::size_t> seen;
        for (const auto& r : refs)
            if (!seen.insert(r.device).second)
                throw SchemaError(std::string(what) + " bind device " + std::to_string(r.device) + " twice");
    };
    check_distinct(plan.inputs, "Inputs");
    check_distinct(plan.outputs, "Outputs");
    return plan;
}

std::vector<PlanViolation> validate_plan(const ExecutionPlan& plan) {
    enum class Cell { Undefined, Input, Armed, Data };
    std::vector<PlanViolation> out;
    std::vector<Cell> cells(plan.row_size, Cell::Undefined);
    std::vector<bool> is_input(plan.row_size, false);
    std::vector<bool> written(plan.row_size, false);

    auto in_range = [&](const SignalRef& r, const std::string& label) {
        if (r.device < plan.row_size) return true;
        out.push_back({label, ViolationKind::IndexOutOfRange,
                       "device " + std::to_string(r.device) + " of '" + r.name + "' is outside a row of " +
                           std::to_string(plan.row_size)});
        return false;
    };

    std::set<std::size_t> seen;
    for (const auto& r : plan.inputs) {
        if (!in_range(r, "Inputs")) continue;
        if (!seen.insert(r.device).second)
            out.push_back({"Inputs", ViolationKind::CountMismatch, "device " + std::to_string(r.device) + " bound to two inputs"});
        cells[r.device] = Cell::Input;
        is_input[r.device] = true;
    }
    seen.clear();
    for (const auto& r : plan.outputs) {
        if (!in_range(r, "Outputs")) continue;
        if (!seen.insert(r.device).second)
            out.push_back({"Outputs", ViolationKind::CountMismatch, "device " + std::to_string(r.device) + " bound to two outputs"});
    }

    std::size_t late_inits = 0;
    std::size_t gates = 0;
    for (std::size_t k = 0; k < plan.sequence.size(); ++k) {
        const auto& entry = plan.sequence[k];
        const std::string& label = entry.label;
        if (const auto* init = std::get_if<InitOp>(&entry.op)) {
            if (k > 0) ++late_inits;
            if (init->targets.empty())
                out.push_back({label, ViolationKind::CountMismatch, "Init with no targets"});
            for (const auto& t : init->targets) {
                if (!in_range(t, label)) continue;
                if (is_input[t.device])
                    out.push_back({label, ViolationKind::OperandIsOutput, "Init overwrites plan input '" + t.name + "'"});
                cells[t.device] = Cell::Armed;
            }
            continue;
        }
        ++gates;
        std::vector<SignalRef> operands;
        SignalRef output;
        if (const auto* n = std::get_if<NotOp>(&entry.op)) {
            operands = {n->input};
            output = n->output;
        } else {
            const auto& g = std::get<NorOp>(entry.op);
            operands = {g.input_a, g.input_b};
            output = g.output;
        }
        bool ok = in_range(output, label);
        for (const auto& r : operands) ok = in_range(r, label) && ok;
        if (!ok) continue;
        for (const auto& r : operands) {
            if (r.device == output.device) {
                out.push_back({label, ViolationKind::OperandIsOutput,
                               "operand '" + r.name + "' shares device " + std::to_string(r.device) + " with the output"});
            } else if (cells[r.device] != Cell::Input && cells[r.device] != Cell::Data) {
                out.push_back({label, ViolationKind::OperandUndefined,
                               "operand '" + r.name + "' on device " + std::to_string(r.device) + " holds no computed value"});
            }
        }
        if (is_input[output.device]) {
            out.push_back({label, ViolationKind::OperandIsOutput, "gate overwrites plan input on device " + std::to_string(output.device)});
        } else if (cells[output.device] != Cell::Armed) {
            out.push_back({label, ViolationKind::OutputNotInitialized,
                           "output '" + output.name + "' on device " + std::to_string(output.device) +
                               " was not initialized since its last write"});
        }
        if (!is_input[output.device]) {
            cells[output.device] = Cell::Data;
            written[output.device] = true;
        }
    }

    for (const auto& r : plan.outputs) {
        if (r.device < plan.row_size && !written[r.device])
            out.push_back({"Outputs", ViolationKind::OutputNeverWritten, "output '" + r.name + "' is never written by a gate"});
    }
    if (late_inits != plan.reuse_cycles)
        out.push_back({"Reuse cycles", ViolationKind::CountMismatch,
                       "declared " + std::to_string(plan.reuse_cycles) + ", sequence has " + std::to_string(late_inits)});
    if (gates != plan.num_gates)
        out.push_back({"Number of Gates", ViolationKind::CountMismatch,
                       "declared " + std::to_string(plan.num_gates) + ", sequence has " + std::to_string(gates)});
    return out;
}

std::string render_plan_json(const ExecutionPlan& plan) {
    ordered_json doc;
    doc["Row size"] = plan.row_size;
    doc["Number of Gates"] = plan.num_gates;
    doc["Inputs"] = render_list(plan.inputs);
    doc["Outputs"] = render_list(plan.outputs);
    doc["Reuse cycles"] = plan.reuse_cycles;
    ordered_json seq = ordered_json::object();
    for (std::size_t k = 0; k < plan.sequence.size(); ++k)
        seq["T" + std::to_string(k)] = render_micro_op(plan.sequence[k].op);
    doc["Execution sequence"] = seq;
    return doc.dump(2) + "\n";
}

}  // namespace magicsim
