#include "gmpforge/cfg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace gmpforge {

namespace {

std::string describe_node(int node) { return "node " + std::to_string(node); }

// True iff `needle` occurs as a contiguous subsequence of `hay`.
bool contains_contiguous(const std::vector<int>& hay, const std::vector<int>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    const std::size_t last_start = hay.size() - needle.size();
    for (std::size_t i = 0; i <= last_start; ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + i)) return true;
    }
    return false;
}

// Worklist enumeration: grow simple paths until no simple extension exists
// (extending into the start node closes a cycle and also stops growth), then
// keep the ones that are not proper sub-paths of another grown path.
std::vector<PrimePath> compute_prime_paths(const std::vector<int>& nodes,
                                           const std::vector<std::vector<int>>& successors) {
    std::vector<std::vector<int>> finals;
    std::deque<std::vector<int>> work;
    for (int n : nodes) work.push_back({n});

    while (!work.empty()) {
        std::vector<int> path = std::move(work.front());
        work.pop_front();
        bool extended = false;
        for (int succ : successors[static_cast<std::size_t>(path.back())]) {
            if (succ == path.front()) {
                std::vector<int> cycle = path;
                cycle.push_back(succ);
                finals.push_back(std::move(cycle));
                extended = true;
            } else if (std::find(path.begin(), path.end(), succ) == path.end()) {
                std::vector<int> longer = path;
                longer.push_back(succ);
                work.push_back(std::move(longer));
                extended = true;
            }
        }
        if (!extended) finals.push_back(std::move(path));
    }

    std::vector<PrimePath> primes;
    for (std::size_t i = 0; i < finals.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < finals.size() && maximal; ++j) {
            if (i == j) continue;
            if (finals[i].size() < finals[j].size() &&
                contains_contiguous(finals[j], finals[i])) {
                maximal = false;
            }
        }
        if (maximal) primes.push_back(PrimePath{std::move(finals[i])});
    }
    std::sort(primes.begin(), primes.end());
    return primes;
}

} // namespace

CfgGraph::CfgGraph(std::vector<int> nodes, std::set<std::pair<int, int>> edges,
                   int entry, std::set<int> exits)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), entry_(entry),
      exits_(std::move(exits)) {
    if (nodes_.empty()) throw CfgError("graph has no nodes");
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
        throw CfgError("duplicate node id");
    if (nodes_.front() < 0) throw CfgError("node ids must be non-negative");
    if (exits_.empty()) throw CfgError("graph has no exit nodes");

    auto is_node = [&](int n) {
        return std::binary_search(nodes_.begin(), nodes_.end(), n);
    };
    if (!is_node(entry_)) throw CfgError("entry is not a graph node");
    for (int e : exits_) {
        if (!is_node(e)) throw CfgError("exit " + describe_node(e) + " is not a graph node");
    }
    for (const auto& [src, dst] : edges_) {
        if (!is_node(src) || !is_node(dst))
            throw CfgError("edge " + std::to_string(src) + "->" + std::to_string(dst) +
                           " references a missing node");
    }

    const std::size_t width = static_cast<std::size_t>(nodes_.back()) + 1;
    successors_.assign(width, {});
    std::vector<std::vector<int>> predecessors(width);
    for (const auto& [src, dst] : edges_) {
        successors_[static_cast<std::size_t>(src)].push_back(dst);
        predecessors[static_cast<std::size_t>(dst)].push_back(src);
    }
    for (auto& succ : successors_) std::sort(succ.begin(), succ.end());

    auto closure = [&](int start, const std::vector<std::vector<int>>& next) {
        std::vector<bool> seen(width, false);
        std::deque<int> queue{start};
        seen[static_cast<std::size_t>(start)] = true;
        while (!queue.empty()) {
            int n = queue.front();
            queue.pop_front();
            for (int m : next[static_cast<std::size_t>(n)]) {
                if (!seen[static_cast<std::size_t>(m)]) {
                    seen[static_cast<std::size_t>(m)] = true;
                    queue.push_back(m);
                }
            }
        }
        return seen;
    };

    const std::vector<bool> from_entry = closure(entry_, successors_);
    std::vector<bool> to_exit(width, false);
    for (int e : exits_) {
        const std::vector<bool> seen = closure(e, predecessors);
        for (std::size_t i = 0; i < width; ++i)
            if (seen[i]) to_exit[i] = true;
    }
    for (int n : nodes_) {
        if (!from_entry[static_cast<std::size_t>(n)])
            throw CfgError(describe_node(n) + " is unreachable from the entry");
        if (!to_exit[static_cast<std::size_t>(n)])
            throw CfgError(describe_node(n) + " cannot reach any exit");
    }

    prime_paths_ = compute_prime_paths(nodes_, successors_);
    primes_by_first_.assign(width, {});
    for (std::size_t i = 0; i < prime_paths_.size(); ++i) {
        const int first = prime_paths_[i].nodes.front();
        primes_by_first_[static_cast<std::size_t>(first)].push_back(i);
    }
}

bool CfgGraph::has_node(int node) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

bool CfgGraph::has_edge(int src, int dst) const {
    if (src < 0 || static_cast<std::size_t>(src) >= successors_.size()) return false;
    const auto& succ = successors_[static_cast<std::size_t>(src)];
    return std::binary_search(succ.begin(), succ.end(), dst);
}

const std::vector<int>& CfgGraph::successors(int node) const {
    if (!has_node(node)) throw CfgError(describe_node(node) + " is not a graph node");
    return successors_[static_cast<std::size_t>(node)];
}

std::string CfgGraph::to_text() const {
    std::ostringstream out;
    out << "entry=" << entry_ << " exits=";
    bool first = true;
    for (int e : exits_) {
        if (!first) out << ',';
        out << e;
        first = false;
    }
    out << '\n';
    for (const auto& [src, dst] : edges_) out << src << "->" << dst << '\n';
    return out.str();
}

CfgGraph CfgGraph::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty graph text");

    int entry = 0;
    std::set<int> exits;
    {
        std::istringstream header(line);
        std::string entry_field, exits_field;
        if (!(header >> entry_field >> exits_field) ||
            entry_field.rfind("entry=", 0) != 0 || exits_field.rfind("exits=", 0) != 0)
            throw ParseError("graph header must be 'entry=<id> exits=<id,...>'");
        try {
            entry = std::stoi(entry_field.substr(6));
            std::istringstream list(exits_field.substr(6));
            std::string item;
            while (std::getline(list, item, ',')) exits.insert(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError("bad node id in graph header: " + line);
        }
    }

    std::set<std::pair<int, int>> edges;
    std::set<int> nodes{entry};
    nodes.insert(exits.begin(), exits.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t arrow = line.find("->");
        if (arrow == std::string::npos)
            throw ParseError("bad edge line: " + line);
        try {
            const int src = std::stoi(line.substr(0, arrow));
            const int dst = std::stoi(line.substr(arrow + 2));
            edges.emplace(src, dst);
            nodes.insert(src);
            nodes.insert(dst);
        } catch (const std::exception&) {
            throw ParseError("bad edge line: " + line);
        }
    }
    return CfgGraph(std::vector<int>(nodes.begin(), nodes.end()), std::move(edges),
                    entry, std::move(exits));
}

CfgGraph build_cfg(std::vector<int> nodes, std::set<std::pair<int, int>> edges,
                   int entry, std::set<int> exits) {
    return CfgGraph(std::move(nodes), std::move(edges), entry, std::move(exits));
}

const std::vector<PrimePath>& enumerate_prime_paths(const CfgGraph& g) {
    return g.prime_paths();
}

CoverageSet coverage_of(const ExecutionTrace& trace, const CfgGraph& g) {
    const auto& t = trace.visited;
    if (t.empty()) throw CfgError("empty execution trace");
    if (t.front() != g.entry())
        throw CfgError("trace starts at " + describe_node(t.front()) +
                       ", not at the entry");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!g.has_edge(t[i], t[i + 1]))
            throw CfgError("trace transition " + std::to_string(t[i]) + "->" +
                           std::to_string(t[i + 1]) + " is not a graph edge");
    }

    CoverageSet result;
    const auto& primes = g.prime_paths();
    const std::size_t total = primes.size();
    for (std::size_t pos = 0; pos < t.size() && result.covered.size() < total; ++pos) {
        const auto& candidates = g.primes_by_first_[static_cast<std::size_t>(t[pos])];
        for (std::size_t idx : candidates) {
            if (result.covered.count(idx)) continue;
            const auto& p = primes[idx].nodes;
            if (p.size() > t.size() - pos) continue;
            if (std::equal(p.begin(), p.end(), t.begin() + static_cast<std::ptrdiff_t>(pos)))
                result.covered.insert(idx);
        }
    }
    return result;
}

CoverageSet union_coverage(const std::vector<CoverageSet>& sets) {
    CoverageSet out;
    for (const auto& s : sets) out.covered.insert(s.covered.begin(), s.covered.end());
    return out;
}

double coverage_fraction(const CoverageSet& c, const CfgGraph& g) {
    const std::size_t total = g.prime_paths().size();
    for (std::size_t idx : c.covered) {
        if (idx >= total)
            throw CfgError("coverage index " + std::to_string(idx) +
                           " is out of range for this graph");
    }
    return static_cast<double>(c.covered.size()) / static_cast<double>(total);
}

} // namespace gmpforge
