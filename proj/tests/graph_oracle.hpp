#ifndef FRONTDOOR_TESTS_GRAPH_ORACLE_HPP
#define FRONTDOOR_TESTS_GRAPH_ORACLE_HPP

// Brute-force d-separation by path enumeration. Test-only: it shares nothing
// with the reachability implementation it checks.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frontdoor/causal_graph.hpp"

namespace oracle {

struct SmallGraph {
    int n = 0;
    std::vector<std::vector<bool>> edge;  // edge[p][c]
};

inline bool is_descendant_or_self(const SmallGraph& g, int from, int target) {
    if (from == target) return true;
    for (int c = 0; c < g.n; ++c)
        if (g.edge[from][c] && is_descendant_or_self(g, c, target)) return true;
    return false;
}

inline bool collider_open(const SmallGraph& g, int v, const std::set<int>& given) {
    for (int c : given)
        if (is_descendant_or_self(g, v, c)) return true;
    return false;
}

inline bool path_active(const SmallGraph& g, const std::vector<int>& path, const std::set<int>& given) {
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        int prev = path[k - 1], v = path[k], next = path[k + 1];
        bool collider = g.edge[prev][v] && g.edge[next][v];
        if (collider) {
            if (!collider_open(g, v, given)) return false;
        } else if (given.count(v)) {
            return false;
        }
    }
    return true;
}

/// True iff no simple path between a and b is active given `given`.
inline bool d_separated(const SmallGraph& g, int a, int b, const std::set<int>& given) {
    std::vector<int> path{a};
    std::vector<bool> on_path(static_cast<std::size_t>(g.n), false);
    on_path[static_cast<std::size_t>(a)] = true;
    std::function<bool(int)> extend = [&](int v) {
        for (int w = 0; w < g.n; ++w) {
            if (on_path[static_cast<std::size_t>(w)] || !(g.edge[v][w] || g.edge[w][v])) continue;
            path.push_back(w);
            if (w == b) {
                if (path_active(g, path, given)) return true;
            } else {
                on_path[static_cast<std::size_t>(w)] = true;
                if (extend(w)) return true;
                on_path[static_cast<std::size_t>(w)] = false;
            }
            path.pop_back();
        }
        return false;
    };
    return !extend(a);
}

/// Exhaustive search for a path whose every edge touches a latent node.
inline bool latent_path(const SmallGraph& g, const std::vector<bool>& latent, int a, int b) {
    std::vector<bool> on_path(static_cast<std::size_t>(g.n), false);
    on_path[static_cast<std::size_t>(a)] = true;
    std::function<bool(int)> extend = [&](int v) {
        for (int w = 0; w < g.n; ++w) {
            if (on_path[static_cast<std::size_t>(w)] || !(g.edge[v][w] || g.edge[w][v])) continue;
            if (!latent[static_cast<std::size_t>(v)] && !latent[static_cast<std::size_t>(w)]) continue;
            if (w == b) return true;
            on_path[static_cast<std::size_t>(w)] = true;
            if (extend(w)) return true;
            on_path[static_cast<std::size_t>(w)] = false;
        }
        return false;
    };
    return extend(a);
}

inline std::string name(int i) { return "v" + std::to_string(i); }

/// Random DAG on n nodes: random topological order, each forward pair joined
/// with probability p.
inline SmallGraph random_dag(std::mt19937_64& rng, int n, double p) {
    SmallGraph g;
    g.n = n;
    g.edge.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < p) g.edge[order[static_cast<std::size_t>(i)]][order[static_cast<std::size_t>(j)]] = true;
    return g;
}

inline frontdoor::graph::Dag to_dag(const SmallGraph& g, const std::vector<bool>& latent = {}) {
    std::vector<frontdoor::graph::Node> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < g.n; ++i) {
        bool is_latent = !latent.empty() && latent[static_cast<std::size_t>(i)];
        nodes.push_back({name(i), is_latent ? frontdoor::graph::NodeKind::Latent : frontdoor::graph::NodeKind::Observed});
    }
    for (int p = 0; p < g.n; ++p)
        for (int c = 0; c < g.n; ++c)
            if (g.edge[p][c]) edges.emplace_back(name(p), name(c));
    return frontdoor::graph::Dag::build(nodes, edges);
}

struct CorpusResult {
    std::size_t graphs = 0;
    std::size_t queries = 0;
    std::size_t mismatches = 0;
};

/// Compares d_separated against the oracle on `count` random DAGs with 2..6
/// nodes, for every ordered pair (a, b) and every conditioning set drawn from
/// the remaining nodes.
inline CorpusResult check_corpus(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    CorpusResult res;
    for (std::size_t k = 0; k < count; ++k) {
        int n = 2 + static_cast<int>(k % 5);
        double p = 0.2 + 0.6 * static_cast<double>((k / 5) % 7) / 6.0;
        auto g = random_dag(rng, n, p);
        auto dag = to_dag(g);
        ++res.graphs;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                for (unsigned mask = 0; mask < (1u << n); ++mask) {
                    if (mask & ((1u << a) | (1u << b))) continue;
                    std::set<int> given;
                    frontdoor::graph::NodeSet cs;
                    for (int c = 0; c < n; ++c)
                        if (mask & (1u << c)) {
                            given.insert(c);
                            cs.push_back(name(c));
                        }
                    bool expected = d_separated(g, a, b, given);
                    bool got = frontdoor::graph::d_separated(dag, {name(a)}, {name(b)}, cs);
                    ++res.queries;
                    if (expected != got) ++res.mismatches;
                }
            }
    }
    return res;
}

}  // namespace oracle

#endif
