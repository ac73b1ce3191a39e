#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gmpforge/error.hpp"
#include "gmpforge/gmp.hpp"
#include "gmpforge/gmp_text.hpp"
#include "gmpforge/rng.hpp"
#include "gmpforge/sut.hpp"
#include "oracles.hpp"

using namespace gmpforge;

namespace {

RuntimeValue N(std::int64_t v) { return RuntimeValue::number(v); }
RuntimeValue T(std::string v) { return RuntimeValue::text(std::move(v)); }
RuntimeValue B(bool v) { return RuntimeValue::boolean(v); }

using VK = ValueKind;

GmpIndividual assemble(std::vector<VK> params, VK ret, VK adf_kind,
                       const std::string& adf_text,
                       const std::vector<std::string>& main_texts) {
    GmpIndividual ind;
    ind.signature = Signature{std::move(params), ret};
    ind.adf_kind = adf_kind;
    ind.adf = ProgramTree(parse_tree(adf_text));
    for (const auto& m : main_texts) ind.mains.emplace_back(parse_tree(m));
    reset_state(ind);
    return ind;
}

// Evaluates one closed expression inside a three-parameter harness program
// whose other mains are inert literals.
RuntimeValue eval_expr(const std::string& expr) {
    auto tree = parse_tree(expr);
    const VK k = tree->kind;
    GmpIndividual ind = assemble({VK::Numeric, VK::Text, VK::Boolean},
                                 VK::Boolean, VK::Numeric, "(num 1)",
                                 {"(num 1)", "(txt \"a\")", "(bool true)"});
    const std::size_t slot = k == VK::Numeric ? 0 : k == VK::Text ? 1 : 2;
    ind.mains[slot] = ProgramTree(std::move(tree));
    Rng rng(1);
    const ExecutionOutcome out = execute(ind, rng);
    REQUIRE(out.produced());
    return (*out.values)[slot];
}

std::unique_ptr<TreeNode> numeric_leaf() {
    auto node = std::make_unique<TreeNode>();
    node->op = NodeOp::value;
    node->kind = VK::Numeric;
    node->payload = N(1);
    return node;
}

std::unique_ptr<TreeNode> adf_call_leaf() {
    auto node = std::make_unique<TreeNode>();
    node->op = NodeOp::adf_call;
    node->kind = VK::Numeric;
    return node;
}

std::unique_ptr<TreeNode> full_add_tree(
    int depth, const std::function<std::unique_ptr<TreeNode>()>& leaf) {
    if (depth == 1) return leaf();
    auto node = std::make_unique<TreeNode>();
    node->op = NodeOp::add;
    node->kind = VK::Numeric;
    node->child_kind = VK::Numeric;
    node->children.push_back(full_add_tree(depth - 1, leaf));
    node->children.push_back(full_add_tree(depth - 1, leaf));
    return node;
}

} // namespace

TEST_CASE("the node catalogue lists twelve functions and six terminals") {
    const auto& catalog = node_catalog();
    REQUIRE(catalog.size() == 18);
    int functions = 0;
    int terminals = 0;
    for (const NodeSpec& spec : catalog) {
        if (spec.is_terminal) {
            ++terminals;
            CHECK(spec.arity == 0);
        } else {
            ++functions;
            CHECK(spec.arity >= 1);
        }
    }
    CHECK(functions == 12);
    CHECK(terminals == 6);

    CHECK(std::string(op_name(NodeOp::division)) == "div");
    CHECK(std::string(op_name(NodeOp::if_statement)) == "if");
    CHECK(std::string(op_name(NodeOp::last_output)) == "lastout");
    CHECK(std::string(op_name(NodeOp::adf_call)) == "adfcall");
}

TEST_CASE("available kinds are derived from the signature") {
    using Kinds = std::vector<VK>;
    CHECK(available_kinds({{VK::Numeric}, VK::Numeric}) ==
          Kinds{VK::Numeric, VK::Boolean});
    CHECK(available_kinds({{VK::Boolean, VK::Boolean}, VK::Boolean}) ==
          Kinds{VK::Boolean});
    // Text always brings Numeric with it, for lengths.
    CHECK(available_kinds({{VK::Text}, VK::Boolean}) ==
          Kinds{VK::Numeric, VK::Text, VK::Boolean});
    CHECK(available_kinds({{VK::Text, VK::Text}, VK::Boolean}) ==
          Kinds{VK::Numeric, VK::Text, VK::Boolean});
    CHECK(available_kinds({{VK::Boolean}, VK::Numeric}) ==
          Kinds{VK::Numeric, VK::Boolean});
    CHECK(available_kinds({{}, VK::Text}) ==
          Kinds{VK::Numeric, VK::Text, VK::Boolean});
}

TEST_CASE("arithmetic wraps and never faults") {
    CHECK(eval_expr("(add (num 7) (num 3))") == N(10));
    CHECK(eval_expr("(sub (num 3) (num 7))") == N(-4));
    CHECK(eval_expr("(mul (num 7) (num 3))") == N(21));
    CHECK(eval_expr("(div (num 7) (num 3))") == N(2));
    CHECK(eval_expr("(div (num 7) (sub (num 3) (num 3)))") == N(1));

    constexpr std::int64_t max = std::numeric_limits<std::int64_t>::max();
    constexpr std::int64_t min = std::numeric_limits<std::int64_t>::min();

    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(num 1)", {"(add (lastout 0 num) (num 1))"});
    ind.state.last_outputs[0] = N(max);
    Rng rng(1);
    CHECK((*execute(ind, rng).values)[0] == N(min));

    ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
                   {"(sub (lastout 0 num) (num 1))"});
    ind.state.last_outputs[0] = N(min);
    CHECK((*execute(ind, rng).values)[0] == N(max));

    ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
                   {"(mul (lastout 0 num) (num 4))"});
    ind.state.last_outputs[0] = N(std::int64_t{1} << 62);
    CHECK((*execute(ind, rng).values)[0] == N(0));

    // The one overflowing division wraps onto itself.
    ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
                   {"(div (lastout 0 num) (sub (num 1) (num 2)))"});
    ind.state.last_outputs[0] = N(min);
    CHECK((*execute(ind, rng).values)[0] == N(min));
}

TEST_CASE("add is polymorphic: sum, concatenation, conjunction") {
    CHECK(eval_expr("(add (txt \"a\") (txt \"b\"))") == T("ab"));
    CHECK(eval_expr("(add (bool true) (bool true))") == B(true));
    CHECK(eval_expr("(add (bool true) (bool false))") == B(false));
    CHECK(eval_expr("(add (bool false) (bool false))") == B(false));

    // Concatenation is capped so state cannot balloon across executions.
    GmpIndividual ind = assemble({VK::Text}, VK::Boolean, VK::Numeric,
                                 "(num 1)",
                                 {"(add (lastout 0 txt) (lastout 0 txt))"});
    const std::string long_text(200, 'x');
    ind.state.last_outputs[0] = T(long_text);
    Rng rng(1);
    const RuntimeValue doubled = (*execute(ind, rng).values)[0];
    CHECK(doubled.as_text().size() == 256);
    CHECK(doubled.as_text() == (long_text + long_text).substr(0, 256));
}

TEST_CASE("comparisons cover every operand kind") {
    CHECK(eval_expr("(eq (num 3) (num 3))") == B(true));
    CHECK(eval_expr("(eq (num 3) (num 4))") == B(false));
    CHECK(eval_expr("(eq (txt \"a\") (txt \"a\"))") == B(true));
    CHECK(eval_expr("(eq (txt \"a\") (txt \"b\"))") == B(false));
    CHECK(eval_expr("(eq (bool true) (bool true))") == B(true));
    CHECK(eval_expr("(ne (num 3) (num 4))") == B(true));
    CHECK(eval_expr("(ne (txt \"a\") (txt \"a\"))") == B(false));
    CHECK(eval_expr("(ne (bool true) (bool false))") == B(true));

    CHECK(eval_expr("(gt (num 5) (num 3))") == B(true));
    CHECK(eval_expr("(gt (num 3) (num 5))") == B(false));
    CHECK(eval_expr("(lt (num 3) (num 5))") == B(true));

    // Boolean ordering: true outranks false.
    CHECK(eval_expr("(gt (bool true) (bool false))") == B(true));
    CHECK(eval_expr("(gt (bool false) (bool true))") == B(false));
    CHECK(eval_expr("(gt (bool true) (bool true))") == B(false));
    CHECK(eval_expr("(lt (bool false) (bool true))") == B(true));
    CHECK(eval_expr("(lt (bool true) (bool true))") == B(false));
}

TEST_CASE("length counts characters or digits") {
    CHECK(eval_expr("(len (txt \"a\"))") == N(1));
    CHECK(eval_expr("(add (len (txt \"a\")) (len (txt \"b\")))") == N(2));
    CHECK(eval_expr("(len (num 7))") == N(1));
    CHECK(eval_expr("(len (num 10))") == N(2));
    CHECK(eval_expr("(len (sub (num 1) (num 5)))") == N(1));

    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(num 1)", {"(len (lastout 0 num))"});
    Rng rng(1);
    // Fresh state: the remembered output is 0, one digit.
    CHECK((*execute(ind, rng).values)[0] == N(1));
    ind.state.last_outputs[0] = N(-12345);
    CHECK((*execute(ind, rng).values)[0] == N(5));
}

TEST_CASE("nonnull reports non-empty text") {
    CHECK(eval_expr("(nonnull (txt \"a\"))") == B(true));
    CHECK(eval_expr("(nonnull (add (txt \"a\") (txt \"b\")))") == B(true));

    // Fresh state remembers empty text; after one execution it holds "a".
    GmpIndividual ind =
        assemble({VK::Text, VK::Boolean}, VK::Boolean, VK::Numeric, "(num 1)",
                 {"(txt \"a\")", "(nonnull (lastout 0 txt))"});
    Rng rng(1);
    CHECK((*execute(ind, rng).values)[1] == B(false));
    CHECK((*execute(ind, rng).values)[1] == B(true));
}

TEST_CASE("if evaluates only the taken branch") {
    CHECK(eval_expr("(if (bool true) (num 5) (num 9))") == N(5));
    CHECK(eval_expr("(if (bool false) (num 5) (num 9))") == N(9));

    // Were the untaken branch evaluated, its random draw would shift the
    // stream consumed by the second main.
    GmpIndividual ind = assemble(
        {VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
        {"(if (bool true) (num 5) (rand num))", "(rand num)"});
    Rng rng(77);
    const ExecutionOutcome out = execute(ind, rng);
    REQUIRE(out.produced());
    Rng replay(77);
    CHECK((*out.values)[0] == N(5));
    CHECK((*out.values)[1] == N(uniform_int(replay, 1, 10)));
}

TEST_CASE("random draws afresh on every evaluation") {
    GmpIndividual ind =
        assemble({VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric,
                 "(rand num)", {"(adfcall num)", "(adfcall num)"});
    Rng rng(9);
    const ExecutionOutcome out = execute(ind, rng);
    REQUIRE(out.produced());
    // The defined function body is re-evaluated per call, not memoised.
    Rng replay(9);
    CHECK((*out.values)[0] == N(uniform_int(replay, 1, 10)));
    CHECK((*out.values)[1] == N(uniform_int(replay, 1, 10)));
}

TEST_CASE("a loop returns its last body value or the kind default") {
    CHECK(eval_expr("(loop (bool false) (num 7))") == N(0));
    CHECK(eval_expr("(loop (bool false) (txt \"a\"))") == T(""));
    CHECK(eval_expr("(loop (bool false) (bool true))") == B(false));

    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(num 1)", {"(loop (rand bool) (rand num))"});
    Rng rng(501);
    const ExecutionOutcome out = execute(ind, rng);
    REQUIRE(out.produced());
    Rng replay(501);
    RuntimeValue expected = N(0);
    while (uniform_index(replay, 2) == 1) {
        expected = N(uniform_int(replay, 1, 10));
    }
    CHECK((*out.values)[0] == expected);
}

TEST_CASE("an always-true loop aborts at exactly the iteration cap") {
    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(num 1)", {"(loop (bool true) (num 7))"});
    Rng rng(1);
    const ExecutionOutcome out = execute(ind, rng);
    CHECK_FALSE(out.produced());
    CHECK(out.abort == AbortReason::loop_cap);
    CHECK(out.aborted_loop_iterations == loop_iteration_cap);
    CHECK(out.aborted_loop_iterations == 250);
    // loop node + 251 condition evaluations + 250 body evaluations.
    CHECK(out.steps_used == 502);

    // The abort leaves state untouched.
    CHECK(ind.state.execution_count == 0);
    CHECK(ind.state.last_outputs[0] == N(0));

    // Nested: the inner loop trips first and reports its own counter.
    GmpIndividual nested =
        assemble({VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
                 {"(loop (bool true) (loop (bool true) (num 7)))"});
    const ExecutionOutcome inner = execute(nested, rng);
    CHECK(inner.abort == AbortReason::loop_cap);
    CHECK(inner.aborted_loop_iterations == 250);
    CHECK(inner.steps_used == 504);
    CHECK(inner.steps_used <= execute_step_cap);
}

TEST_CASE("the step cap bounds one execution of all main trees") {
    // A depth-15 tree of additions whose 16384 leaves each invoke a depth-5
    // defined function: 32767 + 16384*31 = 540671 steps per main tree.
    GmpIndividual one;
    one.signature = Signature{{VK::Numeric}, VK::Numeric};
    one.adf_kind = VK::Numeric;
    one.adf = ProgramTree(full_add_tree(5, numeric_leaf));
    one.mains.emplace_back(full_add_tree(15, adf_call_leaf));
    reset_state(one);
    REQUIRE_NOTHROW(type_check(one));
    REQUIRE(oracles::validate_individual(one) == "");

    Rng rng(1);
    const ExecutionOutcome single = execute(one, rng);
    REQUIRE(single.produced());
    CHECK(single.steps_used == 540671);
    // The defined function sums 16 ones; the main sums 16384 calls.
    CHECK((*single.values)[0] == N(16 * 16384));

    GmpIndividual two;
    two.signature = Signature{{VK::Numeric, VK::Numeric}, VK::Numeric};
    two.adf_kind = VK::Numeric;
    two.adf = ProgramTree(full_add_tree(5, numeric_leaf));
    two.mains.emplace_back(full_add_tree(15, adf_call_leaf));
    two.mains.emplace_back(full_add_tree(15, adf_call_leaf));
    reset_state(two);

    const ExecutionOutcome capped = execute(two, rng);
    CHECK_FALSE(capped.produced());
    CHECK(capped.abort == AbortReason::step_cap);
    CHECK(capped.steps_used == execute_step_cap);
    CHECK(two.state.execution_count == 0);
}

TEST_CASE("state commits only when an execution completes") {
    GmpIndividual ind =
        assemble({VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric,
                 "(num 1)", {"(add (lastout 0 num) (num 1))", "(execcount)"});
    Rng rng(1);

    const ExecutionOutcome r1 = execute(ind, rng);
    REQUIRE(r1.produced());
    CHECK(*r1.values == std::vector<RuntimeValue>{N(1), N(0)});
    const ExecutionOutcome r2 = execute(ind, rng);
    CHECK(*r2.values == std::vector<RuntimeValue>{N(2), N(1)});
    const ExecutionOutcome r3 = execute(ind, rng);
    CHECK(*r3.values == std::vector<RuntimeValue>{N(3), N(2)});
    CHECK(ind.state.execution_count == 3);
    CHECK(ind.state.last_outputs[0] == N(3));
}

TEST_CASE("responses and failures feed back through the state terminals") {
    GmpIndividual ind = assemble(
        {VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric, "(num 1)",
        {"(response num)", "(if (outfail) (num 1) (num 2))"});
    Rng rng(1);

    const ExecutionOutcome fresh = execute(ind, rng);
    CHECK(*fresh.values == std::vector<RuntimeValue>{N(0), N(2)});

    update_state(ind, N(42), false);
    const ExecutionOutcome after = execute(ind, rng);
    CHECK(*after.values == std::vector<RuntimeValue>{N(42), N(2)});

    update_state(ind, std::nullopt, true);
    const ExecutionOutcome failed = execute(ind, rng);
    // The response sticks around; only the failure flag flips.
    CHECK(*failed.values == std::vector<RuntimeValue>{N(42), N(1)});

    update_state(ind, N(7), false);
    const ExecutionOutcome recovered = execute(ind, rng);
    CHECK(*recovered.values == std::vector<RuntimeValue>{N(7), N(2)});
}

TEST_CASE("oversized text responses are truncated into state") {
    GmpIndividual ind = assemble({VK::Text}, VK::Text, VK::Text, "(txt \"a\")",
                                 {"(response txt)"});
    update_state(ind, T(std::string(400, 'q')), false);
    CHECK(ind.state.program_response.as_text().size() == 256);

    Rng rng(1);
    const ExecutionOutcome out = execute(ind, rng);
    CHECK((*out.values)[0].as_text().size() == 256);
}

TEST_CASE("reset restores the neutral state") {
    GmpIndividual ind =
        assemble({VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric,
                 "(num 1)", {"(num 5)", "(num 6)"});
    Rng rng(1);
    execute(ind, rng);
    update_state(ind, N(9), true);
    REQUIRE(ind.state.execution_count == 1);

    reset_state(ind);
    CHECK(ind.state.execution_count == 0);
    CHECK(ind.state.program_response == N(0));
    CHECK_FALSE(ind.state.output_failure);
    CHECK(ind.state.last_outputs ==
          std::vector<RuntimeValue>{N(0), N(0)});
}

TEST_CASE("tree metrics count nodes and depth") {
    auto tree = parse_tree("(add (num 1) (mul (num 2) (num 3)))");
    CHECK(tree_depth(*tree) == 3);
    CHECK(node_count(*tree) == 5);

    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(add (num 1) (num 2))", {"(num 5)"});
    CHECK(total_node_count(ind) == 4);
}

TEST_CASE("generated programs are structurally sound and reproducible") {
    Rng rng(2024);
    for (const auto& sut : registry()) {
        CAPTURE(sut.name);
        for (int i = 0; i < 50; ++i) {
            GmpIndividual ind = generate_random(sut.signature, rng);
            REQUIRE(oracles::validate_individual(ind) == "");
            REQUIRE_NOTHROW(type_check(ind));
            REQUIRE(ind.mains.size() == sut.signature.param_kinds.size());

            // Self-describing text survives a round trip unchanged.
            const std::string text = serialize_gmp(ind);
            const GmpIndividual back = parse_gmp(text);
            REQUIRE(serialize_gmp(back) == text);
            REQUIRE(back.signature == ind.signature);
            REQUIRE(back.adf_kind == ind.adf_kind);
        }
    }

    // Identical seeds generate identical programs.
    Rng a(7);
    Rng b(7);
    const Signature sig = registry()[4].signature;
    CHECK(serialize_gmp(generate_random(sig, a)) ==
          serialize_gmp(generate_random(sig, b)));
}

TEST_CASE("generated programs execute within their guards") {
    Rng rng(5150);
    for (const auto& sut : registry()) {
        CAPTURE(sut.name);
        for (int i = 0; i < 25; ++i) {
            GmpIndividual ind = generate_random(sut.signature, rng);
            Rng exec_rng(derive_seed(99, {static_cast<std::uint64_t>(i)}));
            const ExecutionOutcome out = execute(ind, exec_rng);
            REQUIRE(out.steps_used <= execute_step_cap);
            REQUIRE(out.produced() == (out.abort == AbortReason::none));
            if (out.produced()) {
                REQUIRE(out.values->size() == sut.signature.param_kinds.size());
                for (std::size_t p = 0; p < out.values->size(); ++p) {
                    REQUIRE((*out.values)[p].kind() ==
                            sut.signature.param_kinds[p]);
                }
            }
        }
    }
}

TEST_CASE("serialization writes the documented tokens") {
    CHECK(serialize_tree(*parse_tree("(num 7)")) == "(num 7)");
    CHECK(serialize_tree(*parse_tree("(txt \"a\")")) == "(txt \"a\")");
    CHECK(serialize_tree(*parse_tree("(bool true)")) == "(bool true)");
    CHECK(serialize_tree(*parse_tree("(rand txt)")) == "(rand txt)");
    CHECK(serialize_tree(*parse_tree("(response bool)")) == "(response bool)");
    CHECK(serialize_tree(*parse_tree("(outfail)")) == "(outfail)");
    CHECK(serialize_tree(*parse_tree("(lastout 1 txt)")) == "(lastout 1 txt)");
    CHECK(serialize_tree(*parse_tree("(execcount)")) == "(execcount)");
    CHECK(serialize_tree(*parse_tree("(adfcall num)")) == "(adfcall num)");
    CHECK(serialize_tree(*parse_tree("(if (bool true) (num 1) (num 2))")) ==
          "(if (bool true) (num 1) (num 2))");
    CHECK(serialize_tree(*parse_tree("  (add\n (num 1)\t(num 2) )")) ==
          "(add (num 1) (num 2))");

    const GmpIndividual ind =
        assemble({VK::Numeric, VK::Numeric}, VK::Numeric, VK::Numeric,
                 "(num 7)", {"(lastout 0 num)", "(execcount)"});
    CHECK(serialize_gmp(ind) ==
          "(gmp (returns num) (adf num (num 7)) "
          "(mains (main num (lastout 0 num)) (main num (execcount))))");

    const GmpIndividual back = parse_gmp(serialize_gmp(ind));
    CHECK(serialize_gmp(back) == serialize_gmp(ind));
}

TEST_CASE("text payloads are escaped") {
    TreeNode node;
    node.op = NodeOp::value;
    node.kind = VK::Text;
    node.payload = T("a\"b\\c");
    const std::string text = serialize_tree(node);
    CHECK(text == "(txt \"a\\\"b\\\\c\")");
    CHECK(parse_tree(text)->payload == T("a\"b\\c"));
}

TEST_CASE("parsing infers kinds bottom-up") {
    auto gt = parse_tree("(gt (bool true) (bool false))");
    CHECK(gt->kind == VK::Boolean);
    CHECK(gt->child_kind == VK::Boolean);

    auto len = parse_tree("(len (txt \"a\"))");
    CHECK(len->kind == VK::Numeric);
    CHECK(len->child_kind == VK::Text);

    auto concat = parse_tree("(add (txt \"a\") (txt \"b\"))");
    CHECK(concat->kind == VK::Text);

    auto eq = parse_tree("(eq (txt \"a\") (txt \"b\"))");
    CHECK(eq->child_kind == VK::Text);
}

TEST_CASE("malformed trees are rejected with parse errors") {
    CHECK_THROWS_AS(parse_tree(""), ParseError);
    CHECK_THROWS_AS(parse_tree("(num 7"), ParseError);
    CHECK_THROWS_AS(parse_tree("(num 7) junk"), ParseError);
    CHECK_THROWS_AS(parse_tree(")"), ParseError);
    CHECK_THROWS_AS(parse_tree("(frobnicate (num 1))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(num)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(num seven)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(txt a)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(txt \"unterminated)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(bool maybe)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(rand)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(rand int)"), ParseError);
    CHECK_THROWS_AS(parse_tree("(add (num 1))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(add (num 1) (txt \"a\"))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(mul (num 1) (txt \"a\"))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(if (num 1) (num 1) (num 2))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(if (bool true) (num 1) (txt \"a\"))"),
                    ParseError);
    CHECK_THROWS_AS(parse_tree("(loop (num 1) (num 2))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(len (bool true))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(gt (txt \"a\") (txt \"b\"))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(lt (txt \"a\") (txt \"b\"))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(eq (num 1) (bool true))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(nonnull (num 1))"), ParseError);
    CHECK_THROWS_AS(parse_tree("(lastout -1 num)"), ParseError);
}

TEST_CASE("whole-program parsing enforces the recorded typing") {
    CHECK_THROWS_AS(parse_gmp("(num 7)"), ParseError);
    CHECK_THROWS_AS(parse_gmp("(gmp (adf num (num 7)) (mains))"), ParseError);
    CHECK_THROWS_AS(parse_gmp("(gmp (returns num) (mains))"), ParseError);
    CHECK_THROWS_AS(parse_gmp("(gmp (returns num) (adf num (num 7)))"),
                    ParseError);

    // A structurally valid form whose trees break the typing rules.
    CHECK_THROWS_AS(
        parse_gmp("(gmp (returns num) (adf num (num 7)) "
                  "(mains (main num (adfcall bool))))"),
        ParseError);
    CHECK_THROWS_AS(
        parse_gmp("(gmp (returns num) (adf num (num 0)) "
                  "(mains (main num (num 1))))"),
        ParseError);
    CHECK_THROWS_AS(
        parse_gmp("(gmp (returns num) (adf num (num 7)) "
                  "(mains (main num (lastout 3 num))))"),
        ParseError);
    // Text is not available for an all-numeric component.
    CHECK_THROWS_AS(
        parse_gmp("(gmp (returns num) (adf num (len (txt \"a\"))) "
                  "(mains (main num (num 1))))"),
        ParseError);
    // The defined function may not call itself.
    CHECK_THROWS_AS(
        parse_gmp("(gmp (returns num) (adf num (add (adfcall num) (num 1))) "
                  "(mains (main num (num 1))))"),
        ParseError);

    // The depth bounds are part of the structural contract.
    std::string deep = "(num 1)";
    for (int i = 0; i < 5; ++i) deep = "(add " + deep + " (num 1))";
    CHECK_THROWS_AS(parse_gmp("(gmp (returns num) (adf num " + deep +
                              ") (mains (main num (num 1))))"),
                    ParseError);
}

TEST_CASE("type checking pins payload and state shape") {
    GmpIndividual ind = assemble({VK::Numeric}, VK::Numeric, VK::Numeric,
                                 "(num 7)", {"(num 5)"});
    REQUIRE_NOTHROW(type_check(ind));

    GmpIndividual wrong = ind;
    wrong.state.last_outputs.clear();
    CHECK_THROWS_AS(type_check(wrong), ParseError);

    wrong = ind;
    wrong.state.last_outputs[0] = T("x");
    CHECK_THROWS_AS(type_check(wrong), ParseError);

    wrong = ind;
    wrong.state.execution_count = -1;
    CHECK_THROWS_AS(type_check(wrong), ParseError);

    wrong = ind;
    wrong.adf_kind = VK::Text;
    CHECK_THROWS_AS(type_check(wrong), ParseError);

    wrong = ind;
    wrong.mains.clear();
    CHECK_THROWS_AS(type_check(wrong), ParseError);
}

TEST_CASE("pretty printing indents functions and inlines terminals") {
    CHECK(pretty_print_tree(*parse_tree("(num 7)")) == "(num 7)\n");
    CHECK(pretty_print_tree(*parse_tree("(add (num 1) (num 2))")) ==
          "(add\n  (num 1)\n  (num 2))\n");
}

TEST_CASE("mutation preserves structural soundness") {
    Rng rng(31337);
    for (const auto& sut : registry()) {
        CAPTURE(sut.name);
        for (int i = 0; i < 20; ++i) {
            GmpIndividual ind = generate_random(sut.signature, rng);
            mutate(ind, rng);
            REQUIRE(oracles::validate_individual(ind) == "");
            REQUIRE_NOTHROW(type_check(ind));
            REQUIRE(ind.signature == sut.signature);
        }
    }

    // Identical seeds mutate identically.
    Rng gen(11);
    GmpIndividual ind = generate_random(registry()[13].signature, gen);
    GmpIndividual copy = ind.clone();
    Rng m1(4242);
    Rng m2(4242);
    mutate(ind, m1);
    mutate(copy, m2);
    CHECK(serialize_gmp(ind) == serialize_gmp(copy));
}

TEST_CASE("crossover swaps kind-compatible subtrees between clones") {
    Rng rng(60601);
    for (const auto& sut : registry()) {
        CAPTURE(sut.name);
        for (int i = 0; i < 15; ++i) {
            GmpIndividual a = generate_random(sut.signature, rng);
            GmpIndividual b = generate_random(sut.signature, rng);
            const std::string before_a = serialize_gmp(a);
            const std::string before_b = serialize_gmp(b);

            auto [child_a, child_b] = crossover(a, b, rng);
            REQUIRE(oracles::validate_individual(child_a) == "");
            REQUIRE(oracles::validate_individual(child_b) == "");
            REQUIRE_NOTHROW(type_check(child_a));
            REQUIRE_NOTHROW(type_check(child_b));

            // Parents are untouched.
            REQUIRE(serialize_gmp(a) == before_a);
            REQUIRE(serialize_gmp(b) == before_b);
        }
    }

    GmpIndividual left = generate_random(registry()[0].signature, rng);
    GmpIndividual right = generate_random(registry()[4].signature, rng);
    CHECK_THROWS_AS(crossover(left, right, rng), ContractError);
}

TEST_CASE("clones are deep and carry fresh state") {
    Rng rng(808);
    GmpIndividual ind = generate_random(registry()[4].signature, rng);
    Rng exec_rng(1);
    execute(ind, exec_rng);
    update_state(ind, N(5), true);

    GmpIndividual copy = ind.clone();
    CHECK(serialize_gmp(copy) == serialize_gmp(ind));
    CHECK(copy.state.execution_count == 0);
    CHECK_FALSE(copy.state.output_failure);

    // Mutating the copy leaves the original untouched.
    const std::string before = serialize_gmp(ind);
    Rng mut(99);
    mutate(copy, mut);
    CHECK(serialize_gmp(ind) == before);
}
