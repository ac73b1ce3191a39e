#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "gmpforge/cfg.hpp"
#include "oracles.hpp"

using namespace gmpforge;

namespace {

CfgGraph line_loop() {
    return CfgGraph({0, 1, 2}, {{0, 1}, {1, 1}, {1, 2}}, 0, {2});
}

CfgGraph diamond() {
    return CfgGraph({0, 1, 2, 3}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, 0, {3});
}

std::vector<std::vector<int>> as_lists(const std::vector<PrimePath>& primes) {
    std::vector<std::vector<int>> out;
    for (const auto& p : primes) out.push_back(p.nodes);
    return out;
}

// Random graphs exercise shapes no hand-written case covers. Invalid draws
// (unreachable nodes and the like) are discarded.
std::optional<CfgGraph> random_graph(std::mt19937_64& rng) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::set<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (rng() % 100 < 30) edges.emplace(a, b);
        }
    }
    std::set<int> exits{n - 1};
    for (int a = 0; a < n; ++a) {
        bool sink = true;
        for (const auto& e : edges) {
            if (e.first == a) {
                sink = false;
                break;
            }
        }
        if (sink) exits.insert(a);
    }
    std::vector<int> nodes(static_cast<std::size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 0);
    try {
        return CfgGraph(std::move(nodes), std::move(edges), 0, std::move(exits));
    } catch (const CfgError&) {
        return std::nullopt;
    }
}

std::vector<int> random_walk(const CfgGraph& g, std::mt19937_64& rng) {
    std::vector<int> t{g.entry()};
    for (int len = 0; len < 40; ++len) {
        const auto& succ = g.successors(t.back());
        if (succ.empty()) break;
        if (g.exits().count(t.back()) && (rng() & 3u) == 0) break;
        t.push_back(succ[rng() % succ.size()]);
    }
    return t;
}

} // namespace

TEST_CASE("graph construction rejects malformed shapes") {
    CHECK_THROWS_AS(CfgGraph({}, {}, 0, {0}), CfgError);
    CHECK_THROWS_AS(CfgGraph({0, 0}, {}, 0, {0}), CfgError);
    CHECK_THROWS_AS(CfgGraph({-1, 0}, {{-1, 0}}, -1, {0}), CfgError);
    CHECK_THROWS_AS(CfgGraph({0}, {}, 0, {}), CfgError);
    CHECK_THROWS_AS(CfgGraph({1, 2}, {{1, 2}}, 0, {2}), CfgError);
    CHECK_THROWS_AS(CfgGraph({0, 1}, {{0, 1}}, 0, {2}), CfgError);
    CHECK_THROWS_AS(CfgGraph({0, 1}, {{0, 5}}, 0, {1}), CfgError);
    // Node 2 is not reachable from the entry.
    CHECK_THROWS_AS(CfgGraph({0, 1, 2}, {{0, 1}, {2, 1}}, 0, {1}), CfgError);
    // Node 2 cannot reach the exit.
    CHECK_THROWS_AS(CfgGraph({0, 1, 2}, {{0, 1}, {0, 2}, {2, 2}}, 0, {1}), CfgError);
}

TEST_CASE("graph accessors expose the validated shape") {
    const CfgGraph g = diamond();
    CHECK(g.entry() == 0);
    CHECK(g.exits() == std::set<int>{3});
    CHECK(g.has_node(2));
    CHECK_FALSE(g.has_node(4));
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(7, 0));
    CHECK(g.successors(0) == std::vector<int>{1, 2});
    CHECK(g.successors(3).empty());
    CHECK_THROWS_AS(g.successors(9), CfgError);
}

TEST_CASE("prime paths of small graphs match hand enumerations") {
    const CfgGraph single({0}, {}, 0, {0});
    CHECK(as_lists(single.prime_paths()) == std::vector<std::vector<int>>{{0}});

    CHECK(as_lists(line_loop().prime_paths()) ==
          std::vector<std::vector<int>>{{0, 1, 2}, {1, 1}});

    CHECK(as_lists(diamond().prime_paths()) ==
          std::vector<std::vector<int>>{{0, 1, 3}, {0, 2, 3}});

    const CfgGraph guarded({0, 1, 2}, {{0, 1}, {0, 2}, {1, 1}, {1, 2}}, 0, {2});
    CHECK(as_lists(guarded.prime_paths()) ==
          std::vector<std::vector<int>>{{0, 1, 2}, {0, 2}, {1, 1}});

    // Two-node cycle: both rotations are distinct prime paths.
    const CfgGraph pump({0, 1, 2}, {{0, 1}, {1, 2}, {2, 1}}, 0, {2});
    CHECK(as_lists(pump.prime_paths()) ==
          std::vector<std::vector<int>>{{0, 1, 2}, {1, 2, 1}, {2, 1, 2}});
}

TEST_CASE("prime paths match the exhaustive reference on random graphs") {
    std::mt19937_64 rng(20240601);
    int valid = 0;
    for (int attempt = 0; attempt < 20000 && valid < 200; ++attempt) {
        const auto g = random_graph(rng);
        if (!g) continue;
        ++valid;
        const auto got = as_lists(g->prime_paths());
        const auto want = oracles::prime_paths_reference(*g);
        REQUIRE(got == want);
        for (std::size_t i = 1; i < got.size(); ++i) REQUIRE(got[i - 1] < got[i]);
    }
    CHECK(valid == 200);
}

TEST_CASE("a path is toured only when it appears contiguously in the trace") {
    const CfgGraph g = line_loop();
    REQUIRE(as_lists(g.prime_paths()) ==
            std::vector<std::vector<int>>{{0, 1, 2}, {1, 1}});

    // 0,1,2 all appear in order, but 1 repeats between them: only the
    // self-loop is toured.
    const CoverageSet looped = coverage_of(ExecutionTrace{{0, 1, 1, 2}}, g);
    CHECK(looped.covered == std::set<std::size_t>{1});

    const CoverageSet straight = coverage_of(ExecutionTrace{{0, 1, 2}}, g);
    CHECK(straight.covered == std::set<std::size_t>{0});

    CHECK(coverage_fraction(looped, g) == doctest::Approx(0.5));
    const CoverageSet both = union_coverage({looped, straight});
    CHECK(both.covered == std::set<std::size_t>{0, 1});
    CHECK(coverage_fraction(both, g) == doctest::Approx(1.0));

    // A partial trace (no exit reached) still counts what it toured.
    const CoverageSet partial = coverage_of(ExecutionTrace{{0, 1, 1}}, g);
    CHECK(partial.covered == std::set<std::size_t>{1});
}

TEST_CASE("coverage rejects traces that do not walk the graph") {
    const CfgGraph g = line_loop();
    CHECK_THROWS_AS(coverage_of(ExecutionTrace{{}}, g), CfgError);
    CHECK_THROWS_AS(coverage_of(ExecutionTrace{{1, 2}}, g), CfgError);
    CHECK_THROWS_AS(coverage_of(ExecutionTrace{{0, 2}}, g), CfgError);
    CHECK_THROWS_AS(coverage_of(ExecutionTrace{{0, 1, 2, 2}}, g), CfgError);
}

TEST_CASE("coverage of random walks matches a reference scan") {
    std::mt19937_64 rng(77001);
    int valid = 0;
    for (int attempt = 0; attempt < 20000 && valid < 60; ++attempt) {
        const auto g = random_graph(rng);
        if (!g) continue;
        ++valid;
        const auto& primes = g->prime_paths();
        std::vector<std::vector<int>> walks;
        std::vector<CoverageSet> sets;
        for (int w = 0; w < 5; ++w) {
            walks.push_back(random_walk(*g, rng));
            sets.push_back(coverage_of(ExecutionTrace{walks.back()}, *g));
            std::set<std::size_t> expected;
            for (std::size_t i = 0; i < primes.size(); ++i) {
                if (oracles::occurs_within(primes[i].nodes, walks.back()))
                    expected.insert(i);
            }
            REQUIRE(sets.back().covered == expected);
        }
        const double got = coverage_fraction(union_coverage(sets), *g);
        REQUIRE(got == oracles::fitness_reference(walks, *g));
    }
    CHECK(valid == 60);
}

TEST_CASE("coverage fraction validates its indices") {
    const CfgGraph g = line_loop();
    CHECK(coverage_fraction(CoverageSet{}, g) == doctest::Approx(0.0));
    CoverageSet bogus;
    bogus.covered.insert(17);
    CHECK_THROWS_AS(coverage_fraction(bogus, g), CfgError);
    CHECK(coverage_fraction(union_coverage({}), g) == doctest::Approx(0.0));
}

TEST_CASE("graph text form round-trips") {
    const CfgGraph g = line_loop();
    CHECK(g.to_text() == "entry=0 exits=2\n0->1\n1->1\n1->2\n");
    CHECK(CfgGraph::from_text(g.to_text()) == g);

    const CfgGraph d = diamond();
    CHECK(CfgGraph::from_text(d.to_text()) == d);

    const CfgGraph multi({0, 1, 2}, {{0, 1}, {0, 2}}, 0, {1, 2});
    CHECK(multi.to_text() == "entry=0 exits=1,2\n0->1\n0->2\n");
    CHECK(CfgGraph::from_text(multi.to_text()) == multi);

    // A graph with a single node and no edges survives the round trip.
    const CfgGraph lone({0}, {}, 0, {0});
    CHECK(CfgGraph::from_text(lone.to_text()) == lone);
}

TEST_CASE("graph text parsing reports malformed input") {
    CHECK_THROWS_AS(CfgGraph::from_text(""), ParseError);
    CHECK_THROWS_AS(CfgGraph::from_text("exits=2 entry=0\n"), ParseError);
    CHECK_THROWS_AS(CfgGraph::from_text("entry=x exits=2\n"), ParseError);
    CHECK_THROWS_AS(CfgGraph::from_text("entry=0 exits=2\n0=>2\n"), ParseError);
    // An empty exit list parses but fails shape validation.
    CHECK_THROWS_AS(CfgGraph::from_text("entry=0 exits=\n"), CfgError);
    CHECK_THROWS_AS(CfgGraph::from_text("entry=0 exits=2\n0->two\n"), ParseError);
    // Well-formed text describing an invalid graph fails shape validation.
    CHECK_THROWS_AS(CfgGraph::from_text("entry=0 exits=2\n1->2\n"), CfgError);
}
