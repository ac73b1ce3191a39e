#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gmpforge/error.hpp"

namespace gmpforge {

// A prime path: a maximal simple path of a control-flow graph. Simple means
// no repeated node, except that the first and last node may coincide (a
// cycle). Maximal means the path is not a proper contiguous sub-path of any
// other simple path of the graph.
struct PrimePath {
    std::vector<int> nodes;

    bool operator==(const PrimePath& other) const = default;
    bool operator<(const PrimePath& other) const { return nodes < other.nodes; }
};

// The node-visit sequence of one execution of an instrumented component.
struct ExecutionTrace {
    std::vector<int> visited;
};

// Indices into a graph's canonical prime-path list.
struct CoverageSet {
    std::set<std::size_t> covered;

    bool operator==(const CoverageSet& other) const = default;
};

// An immutable control-flow graph. Construction validates the shape: the
// entry and all exits are nodes, every edge endpoint is a node, every node is
// reachable from the entry, and every node can reach at least one exit. The
// prime paths are computed once at construction and held in canonical
// (lexicographic) order.
class CfgGraph {
public:
    CfgGraph(std::vector<int> nodes, std::set<std::pair<int, int>> edges,
             int entry, std::set<int> exits);

    const std::vector<int>& nodes() const { return nodes_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }
    int entry() const { return entry_; }
    const std::set<int>& exits() const { return exits_; }

    bool has_node(int node) const;
    bool has_edge(int src, int dst) const;
    const std::vector<int>& successors(int node) const;

    const std::vector<PrimePath>& prime_paths() const { return prime_paths_; }

    // Plain-text adjacency form:
    //   entry=0 exits=2,3
    //   0->1
    //   1->2
    // Edges are emitted in sorted order; parsing rebuilds and re-validates.
    std::string to_text() const;
    static CfgGraph from_text(const std::string& text);

    bool operator==(const CfgGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_ &&
               entry_ == other.entry_ && exits_ == other.exits_;
    }

private:
    std::vector<int> nodes_;
    std::set<std::pair<int, int>> edges_;
    int entry_;
    std::set<int> exits_;
    std::vector<std::vector<int>> successors_; // indexed by node id
    std::vector<PrimePath> prime_paths_;
    // prime-path indices grouped by their first node; used by coverage_of.
    std::vector<std::vector<std::size_t>> primes_by_first_;

    friend CoverageSet coverage_of(const ExecutionTrace&, const CfgGraph&);
};

CfgGraph build_cfg(std::vector<int> nodes, std::set<std::pair<int, int>> edges,
                   int entry, std::set<int> exits);

// The canonical prime-path list of the graph (cached at construction).
const std::vector<PrimePath>& enumerate_prime_paths(const CfgGraph& g);

// Tour semantics: a prime path is covered iff it occurs as a contiguous
// subsequence of the trace. The trace must start at the entry and follow
// edges of g; anything else raises CfgError.
CoverageSet coverage_of(const ExecutionTrace& trace, const CfgGraph& g);

CoverageSet union_coverage(const std::vector<CoverageSet>& sets);

// |covered| / |prime paths|, in [0, 1].
double coverage_fraction(const CoverageSet& c, const CfgGraph& g);

} // namespace gmpforge
