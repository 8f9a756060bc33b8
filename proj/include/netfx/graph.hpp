#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netfx/error.hpp"

namespace netfx {

enum class NodeRole {
    covariate,
    treatment,
    feature_block,
    interaction_block,
    outcome,
    other,
};

NodeRole role_from_string(const std::string& s);
std::string to_string(NodeRole role);

using NodeSet = std::set<std::string>;

// Directed acyclic graph over string-labelled nodes. Roles are metadata and
// take no part in node identity. All query methods are const; a fully built
// graph can be shared freely across threads.
class Dag {
public:
    Dag() = default;

    void add_node(const std::string& id, NodeRole role = NodeRole::other);
    // Unknown endpoints are declared implicitly with role `other`.
    void add_edge(const std::string& src, const std::string& dst);
    // Throws GraphError if the directed part contains a cycle.
    void validate() const;

    bool has_node(const std::string& id) const;
    bool has_edge(const std::string& src, const std::string& dst) const;
    std::size_t num_nodes() const { return names_.size(); }
    std::size_t num_edges() const;
    const std::vector<std::string>& nodes() const { return names_; }
    NodeRole role(const std::string& id) const;
    std::vector<std::pair<std::string, std::string>> edges() const;
    std::vector<std::string> nodes_with_role(NodeRole role) const;

    int index_of(const std::string& id) const; // throws GraphError on unknown id
    const std::string& name_of(int ix) const { return names_[static_cast<std::size_t>(ix)]; }
    const std::vector<int>& parents_ix(int v) const { return parents_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& children_ix(int v) const { return children_[static_cast<std::size_t>(v)]; }

private:
    std::vector<std::string> names_;
    std::vector<NodeRole> roles_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

// pa(v, g): nodes u with u -> v
NodeSet parents(const Dag& g, const std::string& v);

// de(s, g) with the reflexive convention v in de({v})
NodeSet descendants(const Dag& g, const NodeSet& s);

// an(s, g), reflexive; used by the blocking rules
NodeSet ancestors(const Dag& g, const NodeSet& s);

// True iff z blocks every path between a and b (reachability formulation of
// d-separation; the exponential path enumerator lives in the test suite as an
// independent oracle). Inputs must be pairwise disjoint.
bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& z);

// cn(a, b, g): nodes on proper causal paths from a to b, excluding a
NodeSet causal_nodes(const Dag& g, const NodeSet& a, const NodeSet& b);

// forb(a, b, g) = de(cn(a, b, g)) + a
NodeSet forbidden_nodes(const Dag& g, const NodeSet& a, const NodeSet& b);

// Adjustment criterion: z avoids the forbidden nodes and blocks every proper
// noncausal path from a to b, checked in the proper back-door graph.
bool is_valid_adjustment(const Dag& g, const NodeSet& a, const std::string& b, const NodeSet& z);

// All subsets z of candidates that satisfy the criterion, ordered by size and
// then lexicographically on the sorted node ids, so output is stable.
std::vector<NodeSet> enumerate_valid_adjustment_sets(const Dag& g, const NodeSet& a,
                                                     const std::string& b,
                                                     const NodeSet& candidates);

// Generic graph built by stacking the per-unit induced subgraphs of an
// explicit DAG: edge A -> B appears iff some within-unit edge A_i -> B_i
// exists. Cross-unit edges do not contribute. Throws GraphError if the result
// is cyclic, which signals a malformed explicit model.
Dag stack_generic(const Dag& explicit_dag,
                  const std::function<std::string(const std::string&)>& unit_of,
                  const std::function<std::string(const std::string&)>& var_of);

struct ProjectedGraph {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> bidirected; // stored with first < second

    bool has_directed(const std::string& a, const std::string& b) const;
    bool has_bidirected(const std::string& a, const std::string& b) const;
};

// Latent projection over `latents`: directed edge A -> B for a directed path
// with latent-only interior, bidirected A <-> B for a path A <- ... -> B whose
// interior nodes are noncolliders in `latents`. Produced for testing model
// structure; the adjustment criterion never consumes it.
ProjectedGraph latent_projection(const Dag& g, const NodeSet& latents);

// Text format: `node <id> role=<role>` declarations, `src -> dst` edges,
// `#` comments. Edges may reference undeclared nodes (role defaults to other).
Dag parse_dag(std::istream& in);
Dag parse_dag_file(const std::string& path);
std::string format_dag(const Dag& g);

} // namespace netfx
