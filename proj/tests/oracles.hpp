#pragma once

// Test-only reference implementations: an exponential path enumerator for
// d-separation and the adjustment criterion, plus shared fixture graphs.
// These stay independent of the production reachability algorithms.

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "netfx/graph.hpp"
#include "netfx/network.hpp"
#include "netfx/rng.hpp"

namespace netfx::test {

struct PathStep {
    int node;
    bool forward; // true: edge points from the previous node into this one
};

using Path = std::vector<PathStep>; // first element has unspecified `forward`

// All paths between nodes of `a` and nodes of `b` in the undirected skeleton,
// recorded with edge directions. Paths may pass through other a/b members.
inline std::vector<Path> all_paths(const Dag& g, const NodeSet& a, const NodeSet& b) {
    std::vector<char> in_b(g.num_nodes(), 0);
    for (const auto& id : b) in_b[static_cast<std::size_t>(g.index_of(id))] = 1;

    std::vector<Path> out;
    std::vector<char> on_path(g.num_nodes(), 0);
    Path path;

    std::function<void(int)> dfs = [&](int v) {
        if (in_b[static_cast<std::size_t>(v)]) {
            out.push_back(path);
            return; // endpoint reached; longer continuations would revisit b
        }
        for (int c : g.children_ix(v)) {
            if (on_path[static_cast<std::size_t>(c)]) continue;
            on_path[static_cast<std::size_t>(c)] = 1;
            path.push_back({c, true});
            dfs(c);
            path.pop_back();
            on_path[static_cast<std::size_t>(c)] = 0;
        }
        for (int p : g.parents_ix(v)) {
            if (on_path[static_cast<std::size_t>(p)]) continue;
            on_path[static_cast<std::size_t>(p)] = 1;
            path.push_back({p, false});
            dfs(p);
            path.pop_back();
            on_path[static_cast<std::size_t>(p)] = 0;
        }
    };

    for (const auto& id : a) {
        const int start = g.index_of(id);
        on_path.assign(g.num_nodes(), 0);
        on_path[static_cast<std::size_t>(start)] = 1;
        path.assign(1, {start, true});
        dfs(start);
    }
    return out;
}

// blocking rules applied literally to one path
inline bool path_blocked(const Dag& g, const Path& path, const NodeSet& z) {
    std::vector<char> in_z(g.num_nodes(), 0);
    for (const auto& id : z) in_z[static_cast<std::size_t>(g.index_of(id))] = 1;
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const bool collider = path[k].forward && !path[k + 1].forward;
        if (collider) {
            // blocked unless some descendant of the collider is in z
            NodeSet self{g.name_of(path[k].node)};
            bool opened = false;
            for (const auto& d : descendants(g, self))
                if (z.count(d)) opened = true;
            if (!opened) return true;
        } else if (in_z[static_cast<std::size_t>(path[k].node)]) {
            return true;
        }
    }
    return false;
}

inline bool d_separated_oracle(const Dag& g, const NodeSet& a, const NodeSet& b,
                               const NodeSet& z) {
    for (const auto& path : all_paths(g, a, b))
        if (!path_blocked(g, path, z)) return false;
    return true;
}

inline bool path_is_proper(const Dag& g, const Path& path, const NodeSet& a) {
    for (std::size_t k = 1; k < path.size(); ++k)
        if (a.count(g.name_of(path[k].node))) return false;
    return true;
}

inline bool path_is_causal(const Path& path) {
    for (std::size_t k = 1; k < path.size(); ++k)
        if (!path[k].forward) return false;
    return true;
}

inline bool is_valid_adjustment_oracle(const Dag& g, const NodeSet& a, const std::string& b,
                                       const NodeSet& z) {
    for (const auto& id : z)
        if (forbidden_nodes(g, a, NodeSet{b}).count(id)) return false;
    for (const auto& path : all_paths(g, a, NodeSet{b})) {
        if (!path_is_proper(g, path, a)) continue;
        if (path_is_causal(path)) continue;
        if (!path_blocked(g, path, z)) return false;
    }
    return true;
}

// random DAG over a fixed topological order
inline Dag random_dag(int n_nodes, double edge_prob, Rng& rng) {
    Dag g;
    for (int v = 0; v < n_nodes; ++v) g.add_node("N" + std::to_string(v));
    for (int u = 0; u < n_nodes; ++u)
        for (int v = u + 1; v < n_nodes; ++v)
            if (rng.bernoulli(edge_prob))
                g.add_edge("N" + std::to_string(u), "N" + std::to_string(v));
    g.validate();
    return g;
}

// disjoint random node sets for queries; any of them may come out empty
inline std::vector<NodeSet> random_disjoint_sets(const Dag& g, int n_sets, Rng& rng) {
    std::vector<NodeSet> sets(static_cast<std::size_t>(n_sets));
    for (const auto& id : g.nodes()) {
        const int bucket = static_cast<int>(rng.uniform_int(0, 2 * n_sets - 1));
        if (bucket < n_sets) sets[static_cast<std::size_t>(bucket)].insert(id);
    }
    return sets;
}

// a query triple (a, b, z) with a and b guaranteed nonempty
inline std::vector<NodeSet> random_query_sets(const Dag& g, Rng& rng) {
    std::vector<std::string> ids = g.nodes();
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    const int n = static_cast<int>(ids.size());
    const int na = 1 + static_cast<int>(rng.uniform_int(0, std::max(0, n / 3 - 1)));
    const int nb = 1 + static_cast<int>(rng.uniform_int(0, std::max(0, n / 3 - 1)));
    std::vector<NodeSet> sets(3);
    int k = 0;
    for (int i = 0; i < na; ++i) sets[0].insert(ids[static_cast<std::size_t>(k++)]);
    for (int i = 0; i < nb; ++i) sets[1].insert(ids[static_cast<std::size_t>(k++)]);
    while (k < n) {
        if (rng.bernoulli(0.5)) sets[2].insert(ids[static_cast<std::size_t>(k)]);
        ++k;
    }
    return sets;
}

// generic graph of the interference study model (three covariates, feature
// and interaction blocks)
inline Dag study_generic_graph() {
    Dag g;
    g.add_node("C1", NodeRole::covariate);
    g.add_node("C2", NodeRole::covariate);
    g.add_node("C3", NodeRole::covariate);
    g.add_node("W", NodeRole::treatment);
    g.add_node("X", NodeRole::feature_block);
    g.add_node("O", NodeRole::interaction_block);
    g.add_node("Y", NodeRole::outcome);
    g.add_edge("C1", "C2");
    g.add_edge("C1", "Y");
    g.add_edge("C2", "W");
    g.add_edge("C3", "W");
    g.add_edge("W", "Y");
    g.add_edge("W", "O");
    g.add_edge("X", "O");
    g.add_edge("X", "Y");
    g.add_edge("O", "Y");
    g.validate();
    return g;
}

// three-node confounded triangle: W <- C -> Y, W -> Y
inline Dag confounded_triangle() {
    Dag g;
    g.add_node("C", NodeRole::covariate);
    g.add_node("W", NodeRole::treatment);
    g.add_node("Y", NodeRole::outcome);
    g.add_edge("C", "W");
    g.add_edge("C", "Y");
    g.add_edge("W", "Y");
    g.validate();
    return g;
}

// interaction networks from the worked examples (0-based indices)
inline InteractionNetwork example_network_small() {
    // edges 1->2, 3->1, 2->3, 3->2
    return InteractionNetwork(3, {{0, 1}, {2, 0}, {1, 2}, {2, 1}});
}

inline InteractionNetwork example_network_six() {
    // edges 5->1, 2->5, 5->2, 6->5, 2->3
    return InteractionNetwork(6, {{4, 0}, {1, 4}, {4, 1}, {5, 4}, {1, 2}});
}

} // namespace netfx::test
