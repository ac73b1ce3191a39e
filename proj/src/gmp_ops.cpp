#include <memory>
#include <utility>
#include <vector>

#include "gmp_detail.hpp"
#include "gmpforge/error.hpp"
#include "gmpforge/gmp.hpp"

namespace gmpforge {

namespace {

// A mutable hook into a tree: the owning pointer plus the node's depth.
struct Slot {
    std::unique_ptr<TreeNode>* node;
    int depth;
};

void collect_slots(std::unique_ptr<TreeNode>& node, int depth, int max_depth,
                   std::vector<Slot>& out) {
    if (depth > max_depth) return;
    out.push_back({&node, depth});
    for (auto& child : node->children) {
        collect_slots(child, depth + 1, max_depth, out);
    }
}

struct TreeRole {
    ProgramTree* tree;
    bool is_adf;
    int depth_limit;
};

TreeRole pick_role(GmpIndividual& individual, std::size_t role,
                   const GenerationParams& params) {
    if (role == 0) return {&individual.adf, true, params.max_function_depth};
    return {&individual.mains[role - 1], false, params.max_main_depth};
}

} // namespace

void mutate(GmpIndividual& individual, Rng& rng, int mutation_depth,
            const GenerationParams& params) {
    std::size_t role_index =
        uniform_index(rng, 1 + individual.mains.size());
    TreeRole role = pick_role(individual, role_index, params);

    std::vector<Slot> slots;
    collect_slots(role.tree->root, 1, mutation_depth, slots);
    Slot target = slots[uniform_index(rng, slots.size())];

    std::vector<ValueKind> kinds = available_kinds(individual.signature);
    detail::GenContext ctx{&individual.signature, std::move(kinds),
                           individual.adf_kind, !role.is_adf};
    int budget = role.depth_limit - target.depth + 1;
    ValueKind kind = (*target.node)->kind;
    *target.node =
        detail::gen_subtree(ctx, kind, budget, params.terminal_chance, rng);
}

std::pair<GmpIndividual, GmpIndividual> crossover(const GmpIndividual& a,
                                                  const GmpIndividual& b,
                                                  Rng& rng,
                                                  const GenerationParams& params) {
    if (!(a.signature == b.signature)) {
        throw ContractError("crossover requires matching component signatures");
    }
    GmpIndividual child_a = a.clone();
    GmpIndividual child_b = b.clone();
    bool kinds_match = a.adf_kind == b.adf_kind;

    constexpr int max_attempts = 10;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::size_t role_index = uniform_index(rng, 1 + child_a.mains.size());
        TreeRole role_a = pick_role(child_a, role_index, params);
        TreeRole role_b = pick_role(child_b, role_index, params);

        std::vector<Slot> slots_a;
        collect_slots(role_a.tree->root, 1, role_a.depth_limit, slots_a);
        Slot pick_a = slots_a[uniform_index(rng, slots_a.size())];
        ValueKind kind = (*pick_a.node)->kind;

        std::vector<Slot> slots_b;
        collect_slots(role_b.tree->root, 1, role_b.depth_limit, slots_b);
        std::erase_if(slots_b, [&](const Slot& s) {
            return (*s.node)->kind != kind;
        });
        if (slots_b.empty()) continue;
        Slot pick_b = slots_b[uniform_index(rng, slots_b.size())];

        int depth_sub_a = tree_depth(**pick_a.node);
        int depth_sub_b = tree_depth(**pick_b.node);
        if (pick_a.depth - 1 + depth_sub_b > role_a.depth_limit) continue;
        if (pick_b.depth - 1 + depth_sub_a > role_b.depth_limit) continue;

        // A transplanted call into the defined function only stays well typed
        // when both parents define the same kind of function.
        if (!kinds_match && (detail::contains_adf_call(**pick_a.node) ||
                             detail::contains_adf_call(**pick_b.node))) {
            continue;
        }

        std::swap(*pick_a.node, *pick_b.node);
        return {std::move(child_a), std::move(child_b)};
    }
    return {std::move(child_a), std::move(child_b)};
}

} // namespace gmpforge
