#include "gmpforge/gmp.hpp"

#include <algorithm>
#include <string>

#include "gmp_detail.hpp"
#include "gmpforge/error.hpp"

namespace gmpforge {

const char* op_name(NodeOp op) {
    switch (op) {
        case NodeOp::add: return "add";
        case NodeOp::division: return "div";
        case NodeOp::multiplication: return "mul";
        case NodeOp::subtraction: return "sub";
        case NodeOp::if_statement: return "if";
        case NodeOp::loop: return "loop";
        case NodeOp::length_of: return "len";
        case NodeOp::equals: return "eq";
        case NodeOp::greater_than: return "gt";
        case NodeOp::less_than: return "lt";
        case NodeOp::not_equal: return "ne";
        case NodeOp::not_null: return "nonnull";
        case NodeOp::value: return "value";
        case NodeOp::random: return "rand";
        case NodeOp::program_response: return "response";
        case NodeOp::output_failure: return "outfail";
        case NodeOp::last_output: return "lastout";
        case NodeOp::execution_count: return "execcount";
        case NodeOp::adf_call: return "adfcall";
    }
    return "?";
}

const std::vector<NodeSpec>& node_catalog() {
    static const std::vector<NodeSpec> catalog = {
        {NodeOp::add, 2, false},
        {NodeOp::division, 2, false},
        {NodeOp::multiplication, 2, false},
        {NodeOp::subtraction, 2, false},
        {NodeOp::if_statement, 3, false},
        {NodeOp::loop, 2, false},
        {NodeOp::length_of, 1, false},
        {NodeOp::equals, 2, false},
        {NodeOp::greater_than, 2, false},
        {NodeOp::less_than, 2, false},
        {NodeOp::not_equal, 2, false},
        {NodeOp::not_null, 1, false},
        {NodeOp::value, 0, true},
        {NodeOp::random, 0, true},
        {NodeOp::program_response, 0, true},
        {NodeOp::output_failure, 0, true},
        {NodeOp::last_output, 0, true},
        {NodeOp::execution_count, 0, true},
    };
    return catalog;
}

std::unique_ptr<TreeNode> TreeNode::clone() const {
    auto copy = std::make_unique<TreeNode>();
    copy->op = op;
    copy->kind = kind;
    copy->child_kind = child_kind;
    copy->payload = payload;
    copy->main_index = main_index;
    copy->children.reserve(children.size());
    for (const auto& child : children) copy->children.push_back(child->clone());
    return copy;
}

GmpIndividual GmpIndividual::clone() const {
    GmpIndividual copy;
    copy.signature = signature;
    copy.adf_kind = adf_kind;
    copy.adf = adf;
    copy.mains = mains;
    reset_state(copy);
    return copy;
}

std::vector<ValueKind> available_kinds(const Signature& signature) {
    bool numeric = signature.return_kind == ValueKind::Numeric;
    bool text = signature.return_kind == ValueKind::Text;
    for (ValueKind k : signature.param_kinds) {
        numeric = numeric || k == ValueKind::Numeric;
        text = text || k == ValueKind::Text;
    }
    // Text implies Numeric so lengths can be taken and compared.
    numeric = numeric || text;
    std::vector<ValueKind> kinds;
    if (numeric) kinds.push_back(ValueKind::Numeric);
    if (text) kinds.push_back(ValueKind::Text);
    kinds.push_back(ValueKind::Boolean);
    return kinds;
}

namespace {

bool kind_available(const std::vector<ValueKind>& kinds, ValueKind k) {
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

RuntimeValue draw_literal(ValueKind kind, Rng& rng) {
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

} // namespace

namespace detail {

bool contains_adf_call(const TreeNode& node) {
    if (node.op == NodeOp::adf_call) return true;
    for (const auto& child : node.children) {
        if (contains_adf_call(*child)) return true;
    }
    return false;
}

std::unique_ptr<TreeNode> gen_subtree(const GenContext& ctx, ValueKind kind,
                                      int budget, double terminal_chance,
                                      Rng& rng) {
    const Signature& sig = *ctx.signature;
    auto node = std::make_unique<TreeNode>();
    node->kind = kind;

    bool force_terminal = budget <= 1;
    bool terminal = force_terminal || uniform_unit(rng) < terminal_chance;

    if (terminal) {
        // Candidate order is fixed so draws are reproducible.
        std::vector<NodeOp> candidates = {NodeOp::value, NodeOp::random};
        if (kind == sig.return_kind) candidates.push_back(NodeOp::program_response);
        if (kind == ValueKind::Boolean) candidates.push_back(NodeOp::output_failure);
        bool any_param = std::find(sig.param_kinds.begin(), sig.param_kinds.end(),
                                   kind) != sig.param_kinds.end();
        if (any_param) candidates.push_back(NodeOp::last_output);
        if (kind == ValueKind::Numeric) candidates.push_back(NodeOp::execution_count);

        node->op = candidates[uniform_index(rng, candidates.size())];
        switch (node->op) {
            case NodeOp::value:
                node->payload = draw_literal(kind, rng);
                break;
            case NodeOp::last_output: {
                std::vector<int> eligible;
                for (std::size_t i = 0; i < sig.param_kinds.size(); ++i) {
                    if (sig.param_kinds[i] == kind) eligible.push_back(static_cast<int>(i));
                }
                node->main_index = eligible[uniform_index(rng, eligible.size())];
                break;
            }
            default:
                break;
        }
        return node;
    }

    std::vector<NodeOp> candidates = {NodeOp::add};
    if (kind == ValueKind::Numeric) {
        candidates.push_back(NodeOp::division);
        candidates.push_back(NodeOp::multiplication);
        candidates.push_back(NodeOp::subtraction);
    }
    candidates.push_back(NodeOp::if_statement);
    candidates.push_back(NodeOp::loop);
    if (kind == ValueKind::Numeric) candidates.push_back(NodeOp::length_of);
    if (kind == ValueKind::Boolean) {
        candidates.push_back(NodeOp::equals);
        candidates.push_back(NodeOp::greater_than);
        candidates.push_back(NodeOp::less_than);
        candidates.push_back(NodeOp::not_equal);
        if (kind_available(ctx.kinds, ValueKind::Text)) {
            candidates.push_back(NodeOp::not_null);
        }
    }
    if (ctx.allow_adf_call && kind == ctx.adf_kind) {
        candidates.push_back(NodeOp::adf_call);
    }

    node->op = candidates[uniform_index(rng, candidates.size())];

    auto child = [&](ValueKind k) {
        node->children.push_back(
            gen_subtree(ctx, k, budget - 1, terminal_chance, rng));
    };

    switch (node->op) {
        case NodeOp::add:
            node->child_kind = kind;
            child(kind);
            child(kind);
            break;
        case NodeOp::division:
        case NodeOp::multiplication:
        case NodeOp::subtraction:
            node->child_kind = ValueKind::Numeric;
            child(ValueKind::Numeric);
            child(ValueKind::Numeric);
            break;
        case NodeOp::if_statement:
            node->child_kind = kind;
            child(ValueKind::Boolean);
            child(kind);
            child(kind);
            break;
        case NodeOp::loop:
            node->child_kind = kind;
            child(ValueKind::Boolean);
            child(kind);
            break;
        case NodeOp::length_of: {
            std::vector<ValueKind> options = {ValueKind::Numeric};
            if (kind_available(ctx.kinds, ValueKind::Text)) {
                options.push_back(ValueKind::Text);
            }
            node->child_kind = options[uniform_index(rng, options.size())];
            child(node->child_kind);
            break;
        }
        case NodeOp::equals:
        case NodeOp::not_equal:
            node->child_kind = ctx.kinds[uniform_index(rng, ctx.kinds.size())];
            child(node->child_kind);
            child(node->child_kind);
            break;
        case NodeOp::greater_than:
        case NodeOp::less_than: {
            std::vector<ValueKind> options;
            if (kind_available(ctx.kinds, ValueKind::Numeric)) {
                options.push_back(ValueKind::Numeric);
            }
            options.push_back(ValueKind::Boolean);
            node->child_kind = options[uniform_index(rng, options.size())];
            child(node->child_kind);
            child(node->child_kind);
            break;
        }
        case NodeOp::not_null:
            node->child_kind = ValueKind::Text;
            child(ValueKind::Text);
            break;
        case NodeOp::adf_call:
            break;
        default:
            throw ContractError("terminal drawn as function");
    }
    return node;
}

} // namespace detail

GmpIndividual generate_random(const Signature& signature, Rng& rng,
                              const GenerationParams& params) {
    GmpIndividual individual;
    individual.signature = signature;
    std::vector<ValueKind> kinds = available_kinds(signature);
    individual.adf_kind = kinds[uniform_index(rng, kinds.size())];

    detail::GenContext adf_ctx{&signature, kinds, individual.adf_kind, false};
    individual.adf = ProgramTree(detail::gen_subtree(
        adf_ctx, individual.adf_kind, params.max_function_depth,
        params.terminal_chance, rng));

    detail::GenContext main_ctx{&signature, kinds, individual.adf_kind, true};
    individual.mains.reserve(signature.param_kinds.size());
    for (ValueKind k : signature.param_kinds) {
        individual.mains.emplace_back(detail::gen_subtree(
            main_ctx, k, params.max_main_depth, params.terminal_chance, rng));
    }
    reset_state(individual);
    return individual;
}

void reset_state(GmpIndividual& individual) {
    individual.state.program_response =
        RuntimeValue::default_of(individual.signature.return_kind);
    individual.state.output_failure = false;
    individual.state.last_outputs.clear();
    for (ValueKind k : individual.signature.param_kinds) {
        individual.state.last_outputs.push_back(RuntimeValue::default_of(k));
    }
    individual.state.execution_count = 0;
}

int tree_depth(const TreeNode& node) {
    int deepest = 0;
    for (const auto& child : node.children) {
        deepest = std::max(deepest, tree_depth(*child));
    }
    return deepest + 1;
}

int node_count(const TreeNode& node) {
    int count = 1;
    for (const auto& child : node.children) count += node_count(*child);
    return count;
}

int total_node_count(const GmpIndividual& individual) {
    int count = node_count(*individual.adf.root);
    for (const auto& main : individual.mains) count += node_count(*main.root);
    return count;
}

namespace {

struct CheckContext {
    const GmpIndividual* individual;
    std::vector<ValueKind> kinds;
    bool in_adf;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

void check_node(const CheckContext& ctx, const TreeNode& node,
                ValueKind expected, const std::string& where) {
    const GmpIndividual& ind = *ctx.individual;
    if (node.kind != expected) {
        fail(where, std::string("expected ") + kind_name(expected) + ", found " +
                        kind_name(node.kind) + " " + op_name(node.op));
    }
    if (!std::count(ctx.kinds.begin(), ctx.kinds.end(), node.kind)) {
        fail(where, std::string(kind_name(node.kind)) +
                        " is not available for this component");
    }

    int expected_arity = -1;
    for (const NodeSpec& spec : node_catalog()) {
        if (spec.op == node.op) expected_arity = spec.arity;
    }
    if (node.op == NodeOp::adf_call) expected_arity = 0;
    if (expected_arity < 0) fail(where, "unknown operation");
    if (static_cast<int>(node.children.size()) != expected_arity) {
        fail(where, std::string(op_name(node.op)) + " expects " +
                        std::to_string(expected_arity) + " children, found " +
                        std::to_string(node.children.size()));
    }

    auto check_child = [&](std::size_t i, ValueKind k) {
        check_node(ctx, *node.children[i], k,
                   where + "/" + op_name(node.op) + "[" + std::to_string(i) + "]");
    };

    switch (node.op) {
        case NodeOp::add:
            check_child(0, node.kind);
            check_child(1, node.kind);
            break;
        case NodeOp::division:
        case NodeOp::multiplication:
        case NodeOp::subtraction:
            if (node.kind != ValueKind::Numeric) fail(where, "arithmetic must be numeric");
            check_child(0, ValueKind::Numeric);
            check_child(1, ValueKind::Numeric);
            break;
        case NodeOp::if_statement:
            check_child(0, ValueKind::Boolean);
            check_child(1, node.kind);
            check_child(2, node.kind);
            break;
        case NodeOp::loop:
            check_child(0, ValueKind::Boolean);
            check_child(1, node.kind);
            break;
        case NodeOp::length_of:
            if (node.kind != ValueKind::Numeric) fail(where, "len must be numeric");
            if (node.child_kind == ValueKind::Boolean) {
                fail(where, "len takes text or numeric");
            }
            check_child(0, node.child_kind);
            break;
        case NodeOp::equals:
        case NodeOp::not_equal:
            if (node.kind != ValueKind::Boolean) fail(where, "comparison must be boolean");
            check_child(0, node.child_kind);
            check_child(1, node.child_kind);
            break;
        case NodeOp::greater_than:
        case NodeOp::less_than:
            if (node.kind != ValueKind::Boolean) fail(where, "comparison must be boolean");
            if (node.child_kind == ValueKind::Text) {
                fail(where, "ordering takes numeric or boolean operands");
            }
            check_child(0, node.child_kind);
            check_child(1, node.child_kind);
            break;
        case NodeOp::not_null:
            if (node.kind != ValueKind::Boolean) fail(where, "nonnull must be boolean");
            check_child(0, ValueKind::Text);
            break;
        case NodeOp::value:
            if (node.payload.kind() != node.kind) fail(where, "literal kind mismatch");
            if (node.kind == ValueKind::Numeric) {
                std::int64_t v = node.payload.as_number();
                if (v < 1 || v > 10) fail(where, "numeric literal outside 1..10");
            }
            if (node.kind == ValueKind::Text) {
                const std::string& s = node.payload.as_text();
                if (s.size() != 1 || s[0] < 'a' || s[0] > 'z') {
                    fail(where, "text literal must be a single letter");
                }
            }
            break;
        case NodeOp::random:
            break;
        case NodeOp::program_response:
            if (node.kind != ind.signature.return_kind) {
                fail(where, "response kind differs from the component return kind");
            }
            break;
        case NodeOp::output_failure:
            if (node.kind != ValueKind::Boolean) fail(where, "outfail must be boolean");
            break;
        case NodeOp::last_output: {
            int n = static_cast<int>(ind.signature.param_kinds.size());
            if (node.main_index < 0 || node.main_index >= n) {
                fail(where, "lastout index out of range");
            }
            if (ind.signature.param_kinds[node.main_index] != node.kind) {
                fail(where, "lastout kind differs from its main tree");
            }
            break;
        }
        case NodeOp::execution_count:
            if (node.kind != ValueKind::Numeric) fail(where, "execcount must be numeric");
            break;
        case NodeOp::adf_call:
            if (ctx.in_adf) fail(where, "the defined function may not call itself");
            if (node.kind != ind.adf_kind) {
                fail(where, "adfcall kind differs from the defined function");
            }
            break;
    }
}

} // namespace

void type_check(const GmpIndividual& individual, const GenerationParams& params) {
    const Signature& sig = individual.signature;
    std::vector<ValueKind> kinds = available_kinds(sig);

    if (!std::count(kinds.begin(), kinds.end(), individual.adf_kind)) {
        fail("adf", "defined function kind is not available for this component");
    }
    if (individual.mains.size() != sig.param_kinds.size()) {
        fail("mains", "expected one main tree per component parameter");
    }
    if (!individual.adf.root) fail("adf", "missing tree");
    for (std::size_t i = 0; i < individual.mains.size(); ++i) {
        if (!individual.mains[i].root) {
            fail("main" + std::to_string(i), "missing tree");
        }
    }

    CheckContext adf_ctx{&individual, kinds, true};
    check_node(adf_ctx, *individual.adf.root, individual.adf_kind, "adf");
    if (tree_depth(*individual.adf.root) > params.max_function_depth) {
        fail("adf", "tree exceeds the function depth bound");
    }

    CheckContext main_ctx{&individual, kinds, false};
    for (std::size_t i = 0; i < individual.mains.size(); ++i) {
        std::string where = "main" + std::to_string(i);
        check_node(main_ctx, *individual.mains[i].root, sig.param_kinds[i], where);
        if (tree_depth(*individual.mains[i].root) > params.max_main_depth) {
            fail(where, "tree exceeds the main depth bound");
        }
    }

    if (individual.state.last_outputs.size() != individual.mains.size()) {
        fail("state", "one remembered output per main tree is required");
    }
    for (std::size_t i = 0; i < individual.state.last_outputs.size(); ++i) {
        if (individual.state.last_outputs[i].kind() != sig.param_kinds[i]) {
            fail("state", "remembered output kind differs from its main tree");
        }
    }
    if (individual.state.program_response.kind() != sig.return_kind) {
        fail("state", "remembered response kind differs from the return kind");
    }
    if (individual.state.execution_count < 0) {
        fail("state", "negative execution count");
    }
}

} // namespace gmpforge
