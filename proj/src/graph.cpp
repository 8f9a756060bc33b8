#include "netfx/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace netfx {

namespace {

std::vector<char> mask_of(const Dag& g, const NodeSet& s) {
    std::vector<char> m(g.num_nodes(), 0);
    for (const auto& id : s) m[static_cast<std::size_t>(g.index_of(id))] = 1;
    return m;
}

NodeSet set_of(const Dag& g, const std::vector<char>& mask) {
    NodeSet out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.insert(g.name_of(static_cast<int>(i)));
    return out;
}

void require_disjoint(const Dag& g, const NodeSet& a, const NodeSet& b, const char* what) {
    for (const auto& id : a) {
        g.index_of(id);
        if (b.count(id))
            throw GraphError(std::string("non-disjoint inputs: node '") + id + "' in both " + what);
    }
}

} // namespace

NodeRole role_from_string(const std::string& s) {
    if (s == "covariate") return NodeRole::covariate;
    if (s == "treatment") return NodeRole::treatment;
    if (s == "feature-block") return NodeRole::feature_block;
    if (s == "interaction-block") return NodeRole::interaction_block;
    if (s == "outcome") return NodeRole::outcome;
    if (s == "other") return NodeRole::other;
    throw ConfigError("unknown node role '" + s + "'");
}

std::string to_string(NodeRole role) {
    switch (role) {
        case NodeRole::covariate: return "covariate";
        case NodeRole::treatment: return "treatment";
        case NodeRole::feature_block: return "feature-block";
        case NodeRole::interaction_block: return "interaction-block";
        case NodeRole::outcome: return "outcome";
        case NodeRole::other: return "other";
    }
    return "other";
}

void Dag::add_node(const std::string& id, NodeRole role) {
    if (id.empty()) throw GraphError("empty node id");
    auto [it, inserted] = index_.emplace(id, static_cast<int>(names_.size()));
    if (!inserted) {
        // re-declaring with an explicit role upgrades the placeholder
        roles_[static_cast<std::size_t>(it->second)] = role;
        return;
    }
    names_.push_back(id);
    roles_.push_back(role);
    parents_.emplace_back();
    children_.emplace_back();
}

void Dag::add_edge(const std::string& src, const std::string& dst) {
    if (src == dst) throw GraphError("self-loop on node '" + src + "'");
    if (!has_node(src)) add_node(src);
    if (!has_node(dst)) add_node(dst);
    const int u = index_.at(src);
    const int v = index_.at(dst);
    auto& ch = children_[static_cast<std::size_t>(u)];
    if (std::find(ch.begin(), ch.end(), v) != ch.end())
        throw GraphError("duplicate edge " + src + " -> " + dst);
    ch.push_back(v);
    parents_[static_cast<std::size_t>(v)].push_back(u);
}

void Dag::validate() const {
    // Kahn's algorithm; leftover nodes indicate a cycle
    std::vector<int> indeg(names_.size(), 0);
    for (std::size_t v = 0; v < names_.size(); ++v)
        indeg[v] = static_cast<int>(parents_[v].size());
    std::deque<int> queue;
    for (std::size_t v = 0; v < names_.size(); ++v)
        if (indeg[v] == 0) queue.push_back(static_cast<int>(v));
    std::size_t seen = 0;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        ++seen;
        for (int c : children_[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
    }
    if (seen != names_.size()) throw GraphError("graph contains a directed cycle");
}

bool Dag::has_node(const std::string& id) const { return index_.count(id) != 0; }

bool Dag::has_edge(const std::string& src, const std::string& dst) const {
    if (!has_node(src) || !has_node(dst)) return false;
    const auto& ch = children_[static_cast<std::size_t>(index_.at(src))];
    return std::find(ch.begin(), ch.end(), index_.at(dst)) != ch.end();
}

std::size_t Dag::num_edges() const {
    std::size_t n = 0;
    for (const auto& ch : children_) n += ch.size();
    return n;
}

NodeRole Dag::role(const std::string& id) const {
    return roles_[static_cast<std::size_t>(index_of(id))];
}

std::vector<std::pair<std::string, std::string>> Dag::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t u = 0; u < names_.size(); ++u)
        for (int v : children_[u]) out.emplace_back(names_[u], names_[static_cast<std::size_t>(v)]);
    return out;
}

std::vector<std::string> Dag::nodes_with_role(NodeRole role) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (roles_[i] == role) out.push_back(names_[i]);
    return out;
}

int Dag::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw GraphError("unknown node id '" + id + "'");
    return it->second;
}

NodeSet parents(const Dag& g, const std::string& v) {
    NodeSet out;
    for (int p : g.parents_ix(g.index_of(v))) out.insert(g.name_of(p));
    return out;
}

NodeSet descendants(const Dag& g, const NodeSet& s) {
    std::vector<char> seen = mask_of(g, s);
    std::deque<int> queue;
    for (const auto& id : s) queue.push_back(g.index_of(id));
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int c : g.children_ix(v)) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = 1;
                queue.push_back(c);
            }
        }
    }
    return set_of(g, seen);
}

NodeSet ancestors(const Dag& g, const NodeSet& s) {
    std::vector<char> seen = mask_of(g, s);
    std::deque<int> queue;
    for (const auto& id : s) queue.push_back(g.index_of(id));
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : g.parents_ix(v)) {
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = 1;
                queue.push_back(p);
            }
        }
    }
    return set_of(g, seen);
}

bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& z) {
    require_disjoint(g, a, b, "a and b");
    require_disjoint(g, a, z, "a and z");
    require_disjoint(g, b, z, "b and z");

    const std::vector<char> in_b = mask_of(g, b);
    const std::vector<char> in_z = mask_of(g, z);
    const std::vector<char> z_anc = mask_of(g, ancestors(g, z));

    // Reachability over (node, approach direction) states. A node entered
    // from a child may continue to parents and children when not conditioned
    // on; a node entered from a parent continues downward when unconditioned
    // and upward when it is an ancestor of z (collider opened by z).
    const std::size_t n = g.num_nodes();
    enum { from_child = 0, from_parent = 1 };
    std::vector<char> visited(2 * n, 0);
    std::deque<std::pair<int, int>> queue;
    for (const auto& id : a) queue.emplace_back(g.index_of(id), from_child);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        const std::size_t key = static_cast<std::size_t>(dir) * n + static_cast<std::size_t>(v);
        if (visited[key]) continue;
        visited[key] = 1;
        if (!in_z[static_cast<std::size_t>(v)] && in_b[static_cast<std::size_t>(v)]) return false;
        if (dir == from_child) {
            if (!in_z[static_cast<std::size_t>(v)]) {
                for (int p : g.parents_ix(v)) queue.emplace_back(p, from_child);
                for (int c : g.children_ix(v)) queue.emplace_back(c, from_parent);
            }
        } else {
            if (!in_z[static_cast<std::size_t>(v)])
                for (int c : g.children_ix(v)) queue.emplace_back(c, from_parent);
            if (z_anc[static_cast<std::size_t>(v)])
                for (int p : g.parents_ix(v)) queue.emplace_back(p, from_child);
        }
    }
    return true;
}

NodeSet causal_nodes(const Dag& g, const NodeSet& a, const NodeSet& b) {
    require_disjoint(g, a, b, "a and b");
    const std::vector<char> in_a = mask_of(g, a);
    const std::size_t n = g.num_nodes();

    // forward: nodes properly reachable from a (no node in a after the first)
    std::vector<char> fwd(n, 0);
    std::deque<int> queue;
    for (const auto& id : a)
        for (int c : g.children_ix(g.index_of(id)))
            if (!in_a[static_cast<std::size_t>(c)] && !fwd[static_cast<std::size_t>(c)]) {
                fwd[static_cast<std::size_t>(c)] = 1;
                queue.push_back(c);
            }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int c : g.children_ix(v))
            if (!in_a[static_cast<std::size_t>(c)] && !fwd[static_cast<std::size_t>(c)]) {
                fwd[static_cast<std::size_t>(c)] = 1;
                queue.push_back(c);
            }
    }

    // backward: nodes that reach b without touching a
    std::vector<char> bwd(n, 0);
    for (const auto& id : b) {
        const int v = g.index_of(id);
        bwd[static_cast<std::size_t>(v)] = 1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : g.parents_ix(v))
            if (!in_a[static_cast<std::size_t>(p)] && !bwd[static_cast<std::size_t>(p)]) {
                bwd[static_cast<std::size_t>(p)] = 1;
                queue.push_back(p);
            }
    }

    NodeSet out;
    for (std::size_t v = 0; v < n; ++v)
        if (fwd[v] && bwd[v]) out.insert(g.name_of(static_cast<int>(v)));
    return out;
}

NodeSet forbidden_nodes(const Dag& g, const NodeSet& a, const NodeSet& b) {
    NodeSet forb = descendants(g, causal_nodes(g, a, b));
    forb.insert(a.begin(), a.end());
    return forb;
}

bool is_valid_adjustment(const Dag& g, const NodeSet& a, const std::string& b, const NodeSet& z) {
    const NodeSet bset{b};
    require_disjoint(g, a, bset, "a and b");
    require_disjoint(g, a, z, "a and z");
    require_disjoint(g, bset, z, "b and z");

    const NodeSet cn = causal_nodes(g, a, bset);
    NodeSet forb = descendants(g, cn);
    forb.insert(a.begin(), a.end());
    for (const auto& id : z)
        if (forb.count(id)) return false;

    // Proper back-door graph: drop the first edge of every proper causal
    // path, i.e. every edge from a into a causal node. Blocking all proper
    // noncausal paths is then plain d-separation.
    Dag pbd;
    for (const auto& id : g.nodes()) pbd.add_node(id, g.role(id));
    for (const auto& [u, v] : g.edges()) {
        if (a.count(u) && cn.count(v)) continue;
        pbd.add_edge(u, v);
    }
    return d_separated(pbd, a, bset, z);
}

std::vector<NodeSet> enumerate_valid_adjustment_sets(const Dag& g, const NodeSet& a,
                                                     const std::string& b,
                                                     const NodeSet& candidates) {
    for (const auto& id : candidates) {
        if (a.count(id) || id == b)
            throw GraphError("candidate node '" + id + "' overlaps the exposure or outcome");
        g.index_of(id);
    }
    const std::vector<std::string> pool(candidates.begin(), candidates.end());
    if (pool.size() > 20)
        throw ConfigError("adjustment-set enumeration limited to 20 candidate nodes, got " +
                          std::to_string(pool.size()));
    std::vector<NodeSet> valid;
    const std::size_t total = static_cast<std::size_t>(1) << pool.size();
    for (std::size_t bits = 0; bits < total; ++bits) {
        NodeSet z;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (bits & (static_cast<std::size_t>(1) << i)) z.insert(pool[i]);
        if (is_valid_adjustment(g, a, b, z)) valid.push_back(std::move(z));
    }
    std::sort(valid.begin(), valid.end(), [](const NodeSet& x, const NodeSet& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    });
    return valid;
}

Dag stack_generic(const Dag& explicit_dag,
                  const std::function<std::string(const std::string&)>& unit_of,
                  const std::function<std::string(const std::string&)>& var_of) {
    Dag generic;
    std::map<std::string, NodeRole> roles;
    for (const auto& id : explicit_dag.nodes()) {
        const std::string label = var_of(id);
        const NodeRole role = explicit_dag.role(id);
        auto it = roles.find(label);
        if (it == roles.end()) {
            roles.emplace(label, role);
            generic.add_node(label, role);
        } else if (it->second != role) {
            throw GraphError("explicit nodes mapped to generic label '" + label +
                             "' carry conflicting roles");
        }
    }
    for (const auto& [u, v] : explicit_dag.edges()) {
        if (unit_of(u) != unit_of(v)) continue; // only within-unit edges stack
        const std::string lu = var_of(u);
        const std::string lv = var_of(v);
        if (lu == lv)
            throw GraphError("within-unit edge maps to a self-loop on generic label '" + lu + "'");
        if (!generic.has_edge(lu, lv)) generic.add_edge(lu, lv);
    }
    generic.validate();
    return generic;
}

bool ProjectedGraph::has_directed(const std::string& a, const std::string& b) const {
    return std::find(directed.begin(), directed.end(), std::make_pair(a, b)) != directed.end();
}

bool ProjectedGraph::has_bidirected(const std::string& a, const std::string& b) const {
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return std::find(bidirected.begin(), bidirected.end(), key) != bidirected.end();
}

ProjectedGraph latent_projection(const Dag& g, const NodeSet& latents) {
    const std::vector<char> latent = mask_of(g, latents);
    const std::size_t n = g.num_nodes();

    // kept nodes reachable from `start` by a directed path whose interior
    // lies entirely in the latent set
    auto reach_through_latents = [&](int start) {
        std::vector<char> seen(n, 0);
        std::vector<int> hits;
        std::deque<int> queue;
        for (int c : g.children_ix(start))
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = 1;
                queue.push_back(c);
            }
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            if (!latent[static_cast<std::size_t>(v)]) {
                hits.push_back(v);
                continue;
            }
            for (int c : g.children_ix(v))
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = 1;
                    queue.push_back(c);
                }
        }
        return hits;
    };

    ProjectedGraph out;
    for (const auto& id : g.nodes())
        if (!latents.count(id)) out.nodes.push_back(id);

    for (const auto& id : out.nodes) {
        const int u = g.index_of(id);
        for (int v : reach_through_latents(u)) out.directed.emplace_back(id, g.name_of(v));
    }

    // A path A <- ... -> B with latent noncollider interior exists iff some
    // latent source reaches both A and B through latents; the two directed
    // branches can always be chosen node-disjoint apart from the source.
    std::set<std::pair<std::string, std::string>> bidir;
    for (const auto& id : latents) {
        const int s = g.index_of(id);
        const std::vector<int> hits = reach_through_latents(s);
        for (std::size_t i = 0; i < hits.size(); ++i)
            for (std::size_t j = i + 1; j < hits.size(); ++j) {
                std::string x = g.name_of(hits[i]);
                std::string y = g.name_of(hits[j]);
                if (y < x) std::swap(x, y);
                bidir.emplace(std::move(x), std::move(y));
            }
    }
    out.bidirected.assign(bidir.begin(), bidir.end());
    std::sort(out.directed.begin(), out.directed.end());
    out.directed.erase(std::unique(out.directed.begin(), out.directed.end()), out.directed.end());
    return out;
}

Dag parse_dag(std::istream& in) {
    Dag g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first == "node") {
            std::string id, attr;
            if (!(ss >> id)) throw ConfigError("graph line " + std::to_string(lineno) + ": missing node id");
            NodeRole role = NodeRole::other;
            if (ss >> attr) {
                if (attr.rfind("role=", 0) != 0)
                    throw ConfigError("graph line " + std::to_string(lineno) +
                                      ": expected role=<role>, got '" + attr + "'");
                role = role_from_string(attr.substr(5));
            }
            g.add_node(id, role);
        } else {
            std::string arrow, dst;
            if (!(ss >> arrow >> dst) || arrow != "->")
                throw ConfigError("graph line " + std::to_string(lineno) +
                                  ": expected 'src -> dst' or 'node <id> role=<role>'");
            std::string extra;
            if (ss >> extra)
                throw ConfigError("graph line " + std::to_string(lineno) + ": trailing tokens");
            g.add_edge(first, dst);
        }
    }
    g.validate();
    return g;
}

Dag parse_dag_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph file '" + path + "'");
    return parse_dag(in);
}

std::string format_dag(const Dag& g) {
    std::ostringstream out;
    for (const auto& id : g.nodes())
        out << "node " << id << " role=" << to_string(g.role(id)) << "\n";
    for (const auto& [u, v] : g.edges()) out << u << " -> " << v << "\n";
    return out.str();
}

} // namespace netfx
