#pragma once

#include <memory>
#include <vector>

#include "gmpforge/gmp.hpp"

namespace gmpforge::detail {

// Everything subtree generation needs to know about the enclosing program.
struct GenContext {
    const Signature* signature;
    std::vector<ValueKind> kinds; // available kinds, canonical order
    ValueKind adf_kind;
    bool allow_adf_call; // true inside main trees
};

// Builds a random subtree producing `kind` whose depth is at most `budget`
// (a single node counts as depth 1).
std::unique_ptr<TreeNode> gen_subtree(const GenContext& ctx, ValueKind kind,
                                      int budget, double terminal_chance,
                                      Rng& rng);

bool contains_adf_call(const TreeNode& node);

} // namespace gmpforge::detail
