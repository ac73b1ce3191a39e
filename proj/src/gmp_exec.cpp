#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "gmpforge/error.hpp"
#include "gmpforge/gmp.hpp"
#include "gmpforge/sut.hpp"

namespace gmpforge {

namespace {

// Thrown when a guard cuts an execution short; caught only by execute().
struct AbortSignal {
    AbortReason reason;
    int loop_iterations;
};

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                     static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                     static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                     static_cast<std::uint64_t>(b));
}

// Division never faults: x / 0 = 1, and the lone two's-complement overflow
// case wraps back onto itself.
std::int64_t safe_div(std::int64_t a, std::int64_t b) {
    if (b == 0) return 1;
    if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
    return a / b;
}

std::int64_t digit_count(std::int64_t n) {
    std::uint64_t magnitude =
        n < 0 ? 0ULL - static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(n);
    std::int64_t digits = 1;
    while (magnitude >= 10) {
        magnitude /= 10;
        ++digits;
    }
    return digits;
}

std::string capped_concat(const std::string& a, const std::string& b) {
    std::string out;
    out.reserve(std::min(a.size() + b.size(), default_text_bound));
    out = a;
    out += b;
    if (out.size() > default_text_bound) out.resize(default_text_bound);
    return out;
}

RuntimeValue draw_random(ValueKind kind, Rng& rng) {
    switch (kind) {
        case ValueKind::Numeric:
            return RuntimeValue::number(uniform_int(rng, 1, 10));
        case ValueKind::Text:
            return RuntimeValue::text(std::string(
                1, static_cast<char>('a' + uniform_index(rng, 26))));
        case ValueKind::Boolean:
            return RuntimeValue::boolean(uniform_index(rng, 2) == 1);
    }
    throw ContractError("unreachable value kind");
}

class Interpreter {
public:
    Interpreter(const GmpIndividual& individual, Rng& rng)
        : individual_(individual), rng_(rng) {}

    std::int64_t steps() const { return steps_; }

    RuntimeValue eval(const TreeNode& node) {
        if (++steps_ > execute_step_cap) {
            steps_ = execute_step_cap;
            throw AbortSignal{AbortReason::step_cap, 0};
        }
        switch (node.op) {
            case NodeOp::add:
                return eval_add(node);
            case NodeOp::division:
                return RuntimeValue::number(
                    safe_div(eval(*node.children[0]).as_number(),
                             eval(*node.children[1]).as_number()));
            case NodeOp::multiplication:
                return RuntimeValue::number(
                    wrap_mul(eval(*node.children[0]).as_number(),
                             eval(*node.children[1]).as_number()));
            case NodeOp::subtraction:
                return RuntimeValue::number(
                    wrap_sub(eval(*node.children[0]).as_number(),
                             eval(*node.children[1]).as_number()));
            case NodeOp::if_statement:
                return eval(*node.children[eval(*node.children[0]).as_boolean() ? 1 : 2]);
            case NodeOp::loop:
                return eval_loop(node);
            case NodeOp::length_of:
                return eval_length(node);
            case NodeOp::equals:
                return RuntimeValue::boolean(eval(*node.children[0]) ==
                                             eval(*node.children[1]));
            case NodeOp::not_equal:
                return RuntimeValue::boolean(!(eval(*node.children[0]) ==
                                               eval(*node.children[1])));
            case NodeOp::greater_than:
                return eval_ordering(node, true);
            case NodeOp::less_than:
                return eval_ordering(node, false);
            case NodeOp::not_null:
                return RuntimeValue::boolean(!eval(*node.children[0]).as_text().empty());
            case NodeOp::value:
                return node.payload;
            case NodeOp::random:
                return draw_random(node.kind, rng_);
            case NodeOp::program_response:
                return individual_.state.program_response;
            case NodeOp::output_failure:
                return RuntimeValue::boolean(individual_.state.output_failure);
            case NodeOp::last_output:
                return individual_.state.last_outputs[node.main_index];
            case NodeOp::execution_count:
                return RuntimeValue::number(individual_.state.execution_count);
            case NodeOp::adf_call:
                return eval(*individual_.adf.root);
        }
        throw ContractError("unreachable operation");
    }

private:
    RuntimeValue eval_add(const TreeNode& node) {
        RuntimeValue a = eval(*node.children[0]);
        RuntimeValue b = eval(*node.children[1]);
        switch (node.kind) {
            case ValueKind::Numeric:
                return RuntimeValue::number(wrap_add(a.as_number(), b.as_number()));
            case ValueKind::Text:
                return RuntimeValue::text(capped_concat(a.as_text(), b.as_text()));
            case ValueKind::Boolean:
                return RuntimeValue::boolean(a.as_boolean() && b.as_boolean());
        }
        throw ContractError("unreachable value kind");
    }

    RuntimeValue eval_loop(const TreeNode& node) {
        RuntimeValue result = RuntimeValue::default_of(node.kind);
        int iterations = 0;
        while (true) {
            if (!eval(*node.children[0]).as_boolean()) break;
            if (iterations == loop_iteration_cap) {
                throw AbortSignal{AbortReason::loop_cap, iterations};
            }
            result = eval(*node.children[1]);
            ++iterations;
        }
        return result;
    }

    RuntimeValue eval_length(const TreeNode& node) {
        RuntimeValue v = eval(*node.children[0]);
        if (v.kind() == ValueKind::Text) {
            return RuntimeValue::number(static_cast<std::int64_t>(v.as_text().size()));
        }
        return RuntimeValue::number(digit_count(v.as_number()));
    }

    RuntimeValue eval_ordering(const TreeNode& node, bool greater) {
        RuntimeValue a = eval(*node.children[0]);
        RuntimeValue b = eval(*node.children[1]);
        bool result;
        if (node.child_kind == ValueKind::Numeric) {
            result = greater ? a.as_number() > b.as_number()
                             : a.as_number() < b.as_number();
        } else {
            // true outranks false
            result = greater ? (a.as_boolean() && !b.as_boolean())
                             : (!a.as_boolean() && b.as_boolean());
        }
        return RuntimeValue::boolean(result);
    }

    const GmpIndividual& individual_;
    Rng& rng_;
    std::int64_t steps_ = 0;
};

} // namespace

ExecutionOutcome execute(GmpIndividual& individual, Rng& rng) {
    Interpreter interp(individual, rng);
    ExecutionOutcome outcome;
    std::vector<RuntimeValue> produced;
    produced.reserve(individual.mains.size());
    try {
        for (const ProgramTree& main : individual.mains) {
            produced.push_back(interp.eval(*main.root));
        }
    } catch (const AbortSignal& signal) {
        outcome.abort = signal.reason;
        outcome.aborted_loop_iterations = signal.loop_iterations;
        outcome.steps_used = interp.steps();
        return outcome;
    }
    outcome.steps_used = interp.steps();
    individual.state.last_outputs = produced;
    individual.state.execution_count += 1;
    outcome.values = std::move(produced);
    return outcome;
}

void update_state(GmpIndividual& individual,
                  const std::optional<RuntimeValue>& response, bool failed) {
    individual.state.output_failure = failed;
    if (response.has_value()) {
        RuntimeValue v = *response;
        if (v.kind() == ValueKind::Text && v.as_text().size() > default_text_bound) {
            v = RuntimeValue::text(v.as_text().substr(0, default_text_bound));
        }
        individual.state.program_response = std::move(v);
    }
}

} // namespace gmpforge
