#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmpforge/rng.hpp"
#include "gmpforge/value.hpp"

namespace gmpforge {

// Every operation a tree node can perform. The first twelve are functions,
// the next six are terminals, and adf_call is the bridge that lets a main
// tree invoke the individual's defined function.
enum class NodeOp {
    add,
    division,
    multiplication,
    subtraction,
    if_statement,
    loop,
    length_of,
    equals,
    greater_than,
    less_than,
    not_equal,
    not_null,
    value,
    random,
    program_response,
    output_failure,
    last_output,
    execution_count,
    adf_call,
};

const char* op_name(NodeOp op);

struct NodeSpec {
    NodeOp op;
    int arity;
    bool is_terminal;
};

// The fixed catalogue of ordinary operations (excludes adf_call, which is
// only legal inside main trees and is handled separately).
const std::vector<NodeSpec>& node_catalog();

struct TreeNode {
    NodeOp op = NodeOp::value;
    // Kind of the value this node produces.
    ValueKind kind = ValueKind::Numeric;
    // For comparisons: the kind of the operands (the node itself is Boolean).
    ValueKind child_kind = ValueKind::Numeric;
    // Literal payload for value nodes and the draw domain for random nodes.
    RuntimeValue payload = RuntimeValue::number(0);
    // For last_output nodes: which main tree's last output is read.
    int main_index = 0;
    std::vector<std::unique_ptr<TreeNode>> children;

    std::unique_ptr<TreeNode> clone() const;
};

struct ProgramTree {
    std::unique_ptr<TreeNode> root;

    ProgramTree() = default;
    explicit ProgramTree(std::unique_ptr<TreeNode> r) : root(std::move(r)) {}
    ProgramTree(const ProgramTree& other)
        : root(other.root ? other.root->clone() : nullptr) {}
    ProgramTree& operator=(const ProgramTree& other) {
        if (this != &other) root = other.root ? other.root->clone() : nullptr;
        return *this;
    }
    ProgramTree(ProgramTree&&) = default;
    ProgramTree& operator=(ProgramTree&&) = default;
};

// Mutable memory carried across a micro-program's executions against one
// component. Reset when evaluation of the individual starts afresh.
struct GmpState {
    RuntimeValue program_response = RuntimeValue::number(0);
    bool output_failure = false;
    std::vector<RuntimeValue> last_outputs;
    std::int64_t execution_count = 0;
};

// One micro-program: a parameterless defined function plus one main tree per
// component parameter, bred against the component named by its signature.
struct GmpIndividual {
    Signature signature;
    ValueKind adf_kind = ValueKind::Numeric;
    ProgramTree adf;
    std::vector<ProgramTree> mains;
    GmpState state;

    // Structural copy with freshly reset state.
    GmpIndividual clone() const;
};

struct GenerationParams {
    double terminal_chance = 0.65;
    int max_function_depth = 5;
    int max_main_depth = 15;
};

inline constexpr int loop_iteration_cap = 250;
inline constexpr std::int64_t execute_step_cap = 1'000'000;

enum class AbortReason { none, loop_cap, step_cap };

// Result of running every main tree once: the produced inputs, or the guard
// that cut the run short.
struct ExecutionOutcome {
    std::optional<std::vector<RuntimeValue>> values;
    AbortReason abort = AbortReason::none;
    int aborted_loop_iterations = 0;
    std::int64_t steps_used = 0;

    bool produced() const { return values.has_value(); }
};

// Kinds a micro-program for this component may use: the parameter kinds, the
// return kind, Boolean (for predicates), and Numeric whenever Text is
// present so lengths can be taken.
std::vector<ValueKind> available_kinds(const Signature& signature);

GmpIndividual generate_random(const Signature& signature, Rng& rng,
                              const GenerationParams& params = {});

// Evaluates every main tree in order against the current state; main trees
// may invoke the defined function at any point. State commits only when the
// run completes.
ExecutionOutcome execute(GmpIndividual& individual, Rng& rng);

// Folds one component response back into the program's state.
void update_state(GmpIndividual& individual,
                  const std::optional<RuntimeValue>& response, bool failed);

void reset_state(GmpIndividual& individual);

// Replaces a uniformly chosen node (among all trees, at depth <= the mutation
// depth bound) with a fresh random subtree that fits the remaining budget.
void mutate(GmpIndividual& individual, Rng& rng, int mutation_depth = 5,
            const GenerationParams& params = {});

// Swaps kind-compatible subtrees between copies of the two parents. Falls
// back to plain clones when no feasible swap is found.
std::pair<GmpIndividual, GmpIndividual> crossover(const GmpIndividual& a,
                                                  const GmpIndividual& b,
                                                  Rng& rng,
                                                  const GenerationParams& params = {});

// Verifies kinds, arities, payload ranges, depth bounds and state shape.
// Throws ParseError with a description of the first violation.
void type_check(const GmpIndividual& individual,
                const GenerationParams& params = {});

int tree_depth(const TreeNode& node);
int node_count(const TreeNode& node);
int total_node_count(const GmpIndividual& individual);

} // namespace gmpforge
