#include <doctest.h>

#include <sstream>

#include "netfx/graph.hpp"
#include "oracles.hpp"

using namespace netfx;

namespace {

NodeSet set(std::initializer_list<std::string> ids) { return NodeSet(ids); }

std::string unit_of(const std::string& id) { return id.substr(id.find('_') + 1); }
std::string var_of(const std::string& id) { return id.substr(0, id.find('_')); }

// explicit graph of the study model on three units; includes the cross-unit
// treatment-to-feature edges implied by the small triangle network
Dag study_explicit_graph() {
    Dag g;
    for (int i = 1; i <= 3; ++i) {
        const std::string u = "_" + std::to_string(i);
        g.add_node("C1" + u, NodeRole::covariate);
        g.add_node("C2" + u, NodeRole::covariate);
        g.add_node("C3" + u, NodeRole::covariate);
        g.add_node("W" + u, NodeRole::treatment);
        g.add_node("X" + u, NodeRole::feature_block);
        g.add_node("O" + u, NodeRole::interaction_block);
        g.add_node("Y" + u, NodeRole::outcome);
        g.add_edge("W" + u, "Y" + u);
        g.add_edge("C2" + u, "W" + u);
        g.add_edge("X" + u, "Y" + u);
        g.add_edge("O" + u, "Y" + u);
        g.add_edge("X" + u, "O" + u);
        g.add_edge("W" + u, "O" + u);
        g.add_edge("C1" + u, "C2" + u);
        g.add_edge("C1" + u, "Y" + u);
        g.add_edge("C3" + u, "W" + u);
    }
    // parents in the triangle network: 1 <- {3}, 2 <- {1, 3}, 3 <- {2}
    g.add_edge("W_3", "X_1");
    g.add_edge("W_1", "X_2");
    g.add_edge("W_3", "X_2");
    g.add_edge("W_2", "X_3");
    g.validate();
    return g;
}

} // namespace

TEST_CASE("parents") {
    Dag chain;
    chain.add_edge("A", "B");
    chain.add_edge("B", "C");
    CHECK(parents(chain, "B") == set({"A"}));

    const Dag g = test::study_generic_graph();
    CHECK(parents(g, "Y") == set({"W", "X", "O", "C1"}));

    Dag isolated;
    isolated.add_node("D");
    CHECK(parents(isolated, "D").empty());
    CHECK_THROWS_AS(parents(isolated, "nope"), GraphError);
}

TEST_CASE("descendants include the set itself") {
    Dag chain;
    chain.add_edge("A", "B");
    chain.add_edge("B", "C");
    CHECK(descendants(chain, set({"A"})) == set({"A", "B", "C"}));

    const Dag g = test::study_generic_graph();
    CHECK(descendants(g, set({"W"})) == set({"W", "O", "Y"}));

    Dag childless;
    childless.add_node("C");
    CHECK(descendants(childless, set({"C"})) == set({"C"}));
}

TEST_CASE("d-separation basics") {
    Dag chain;
    chain.add_edge("A", "B");
    chain.add_edge("B", "C");
    CHECK(d_separated(chain, set({"A"}), set({"C"}), set({"B"})));
    CHECK_FALSE(d_separated(chain, set({"A"}), set({"C"}), {}));

    Dag collider;
    collider.add_edge("A", "B");
    collider.add_edge("C", "B");
    CHECK(d_separated(collider, set({"A"}), set({"C"}), {}));
    CHECK_FALSE(d_separated(collider, set({"A"}), set({"C"}), set({"B"})));

    const Dag tri = test::confounded_triangle();
    CHECK_FALSE(d_separated(tri, set({"W"}), set({"Y"}), set({"C"})));

    CHECK_THROWS_AS(d_separated(chain, set({"A"}), set({"A"}), {}), GraphError);
}

TEST_CASE("collider opened through a descendant of the collider") {
    Dag g;
    g.add_edge("A", "B");
    g.add_edge("C", "B");
    g.add_edge("B", "D");
    CHECK(d_separated(g, set({"A"}), set({"C"}), {}));
    CHECK_FALSE(d_separated(g, set({"A"}), set({"C"}), set({"D"})));
}

TEST_CASE("causal and forbidden nodes") {
    const Dag g = test::study_generic_graph();
    CHECK(causal_nodes(g, set({"X", "W", "O"}), set({"Y"})) == set({"Y"}));
    CHECK(forbidden_nodes(g, set({"X", "W", "O"}), set({"Y"})) == set({"X", "W", "O", "Y"}));

    Dag mediator;
    mediator.add_edge("A", "M");
    mediator.add_edge("M", "B");
    CHECK(causal_nodes(mediator, set({"A"}), set({"B"})) == set({"M", "B"}));
    CHECK(forbidden_nodes(mediator, set({"A"}), set({"B"})) == set({"A", "M", "B"}));

    Dag disconnected;
    disconnected.add_node("A");
    disconnected.add_node("B");
    CHECK(causal_nodes(disconnected, set({"A"}), set({"B"})).empty());
    CHECK(forbidden_nodes(disconnected, set({"A"}), set({"B"})) == set({"A"}));
}

TEST_CASE("adjustment criterion on the study graph") {
    const Dag g = test::study_generic_graph();
    const NodeSet exposure = set({"X", "W", "O"});
    CHECK(is_valid_adjustment(g, exposure, "Y", set({"C1"})));
    CHECK_FALSE(is_valid_adjustment(g, exposure, "Y", {}));
    CHECK_FALSE(is_valid_adjustment(g, exposure, "Y", set({"C3"})));
    CHECK_THROWS_AS(is_valid_adjustment(g, exposure, "Y", set({"W"})), GraphError);
}

TEST_CASE("enumeration matches the worked example") {
    const Dag g = test::study_generic_graph();
    const auto sets = enumerate_valid_adjustment_sets(g, set({"X", "W", "O"}), "Y",
                                                      set({"C1", "C2", "C3"}));
    const std::vector<NodeSet> expected{set({"C1"}),       set({"C2"}),
                                        set({"C1", "C2"}), set({"C1", "C3"}),
                                        set({"C2", "C3"}), set({"C1", "C2", "C3"})};
    CHECK(sets == expected);
}

TEST_CASE("enumeration edge cases") {
    const Dag tri = test::confounded_triangle();
    // confounded pair with no candidates: nothing to report
    CHECK(enumerate_valid_adjustment_sets(tri, set({"W"}), "Y", {}).empty());

    Dag plain;
    plain.add_edge("W", "Y");
    const auto sets = enumerate_valid_adjustment_sets(plain, set({"W"}), "Y", {});
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].empty()); // unconfounded: the empty set is valid and reported
}

TEST_CASE("stacking explicit graphs") {
    // no-interference version: per-unit triangles only
    Dag isolated;
    for (int i = 1; i <= 3; ++i) {
        const std::string u = "_" + std::to_string(i);
        isolated.add_node("C" + u, NodeRole::covariate);
        isolated.add_node("W" + u, NodeRole::treatment);
        isolated.add_node("Y" + u, NodeRole::outcome);
        isolated.add_edge("C" + u, "W" + u);
        isolated.add_edge("C" + u, "Y" + u);
        isolated.add_edge("W" + u, "Y" + u);
    }
    const Dag generic = stack_generic(isolated, unit_of, var_of);
    CHECK(generic.num_nodes() == 3);
    CHECK(generic.has_edge("C", "W"));
    CHECK(generic.has_edge("C", "Y"));
    CHECK(generic.has_edge("W", "Y"));
    CHECK(generic.num_edges() == 3);

    // adding interference edges leaves the generic graph unchanged
    Dag interfering = isolated;
    interfering.add_edge("W_3", "Y_2");
    interfering.add_edge("W_2", "Y_3");
    interfering.add_edge("W_3", "Y_1");
    interfering.add_edge("W_1", "Y_2");
    const Dag generic2 = stack_generic(interfering, unit_of, var_of);
    CHECK(generic2.edges() == generic.edges());

    // the feature-block model stacks to the study generic graph
    const Dag stacked = stack_generic(study_explicit_graph(), unit_of, var_of);
    const Dag expected = test::study_generic_graph();
    CHECK(stacked.num_nodes() == expected.num_nodes());
    auto sorted_edges = [](const Dag& g) {
        auto e = g.edges();
        std::sort(e.begin(), e.end());
        return e;
    };
    CHECK(sorted_edges(stacked) == sorted_edges(expected));
    CHECK(stacked.role("X") == NodeRole::feature_block);
}

TEST_CASE("stacking is idempotent and invariant to unit relabeling") {
    const Dag g = study_explicit_graph();
    auto relabeled_unit = [](const std::string& id) {
        const std::string u = unit_of(id);
        return u == "1" ? "9" : u; // rename unit 1 to 9
    };
    const Dag a = stack_generic(g, unit_of, var_of);
    const Dag b = stack_generic(g, relabeled_unit, var_of);
    auto sorted_edges = [](const Dag& gr) {
        auto e = gr.edges();
        std::sort(e.begin(), e.end());
        return e;
    };
    CHECK(sorted_edges(a) == sorted_edges(b));

    // a graph that is already generic stacks to itself
    const Dag again = stack_generic(a, [](const std::string&) { return std::string("0"); },
                                    [](const std::string& id) { return id; });
    CHECK(sorted_edges(again) == sorted_edges(a));
}

TEST_CASE("stacking a cross-unit-cyclic model fails") {
    Dag g;
    g.add_node("A_1");
    g.add_node("B_1");
    g.add_node("A_2");
    g.add_node("B_2");
    g.add_edge("A_1", "B_1");
    g.add_edge("B_2", "A_2"); // within-unit edges A->B and B->A stack to a cycle
    CHECK_THROWS_AS(stack_generic(g, unit_of, var_of), GraphError);
}

TEST_CASE("latent projection contractions") {
    Dag chain;
    chain.add_edge("A", "L");
    chain.add_edge("L", "B");
    const ProjectedGraph p1 = latent_projection(chain, set({"L"}));
    CHECK(p1.directed == std::vector<std::pair<std::string, std::string>>{{"A", "B"}});
    CHECK(p1.bidirected.empty());

    Dag fork;
    fork.add_edge("L", "A");
    fork.add_edge("L", "B");
    const ProjectedGraph p2 = latent_projection(fork, set({"L"}));
    CHECK(p2.directed.empty());
    CHECK(p2.has_bidirected("A", "B"));

    // projecting over nothing returns the graph unchanged
    const Dag g = test::study_generic_graph();
    const ProjectedGraph p3 = latent_projection(g, {});
    auto edges = g.edges();
    std::sort(edges.begin(), edges.end());
    CHECK(p3.directed == edges);
    CHECK(p3.bidirected.empty());
    CHECK(p3.nodes == g.nodes());
}

TEST_CASE("projection of the explicit model onto one unit matches the generic graph") {
    const Dag g = study_explicit_graph();
    NodeSet latents;
    for (const auto& id : g.nodes())
        if (unit_of(id) != "1") latents.insert(id);
    const ProjectedGraph proj = latent_projection(g, latents);

    CHECK(proj.bidirected.empty());
    const Dag expected = test::study_generic_graph();
    std::vector<std::pair<std::string, std::string>> expected_edges;
    for (const auto& [u, v] : expected.edges()) expected_edges.emplace_back(u + "_1", v + "_1");
    std::sort(expected_edges.begin(), expected_edges.end());
    CHECK(proj.directed == expected_edges);
}

TEST_CASE("d-separation agrees with the path-enumeration oracle") {
    Rng rng(20240301);
    int queries_run = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(0, 5));
        const Dag g = test::random_dag(n, 0.35, rng);
        for (int q = 0; q < 20; ++q) {
            const auto sets = test::random_query_sets(g, rng);
            const bool fast = d_separated(g, sets[0], sets[1], sets[2]);
            const bool slow = test::d_separated_oracle(g, sets[0], sets[1], sets[2]);
            REQUIRE_MESSAGE(fast == slow, "disagreement on trial ", trial);
            ++queries_run;
        }
    }
    CHECK(queries_run == 10000);
}

TEST_CASE("adjustment criterion agrees with the path-enumeration oracle") {
    Rng rng(20240302);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_int(0, 3));
        const Dag g = test::random_dag(n, 0.4, rng);
        auto sets = test::random_query_sets(g, rng);
        const std::string b = *sets[1].begin(); // single outcome node
        // every subset of the pool, exhaustively
        const std::vector<std::string> pool(sets[2].begin(), sets[2].end());
        for (std::size_t bits = 0; bits < (1u << pool.size()); ++bits) {
            NodeSet z;
            for (std::size_t k = 0; k < pool.size(); ++k)
                if (bits & (1u << k)) z.insert(pool[k]);
            const bool fast = is_valid_adjustment(g, sets[0], b, z);
            const bool slow = test::is_valid_adjustment_oracle(g, sets[0], b, z);
            REQUIRE_MESSAGE(fast == slow, "disagreement on trial ", trial);
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("enumeration is exhaustive and exact") {
    Rng rng(20240303);
    for (int trial = 0; trial < 40; ++trial) {
        const Dag g = test::random_dag(6, 0.4, rng);
        const auto sets = test::random_disjoint_sets(g, 3, rng);
        if (sets[0].empty() || sets[1].size() != 1) continue;
        const std::string b = *sets[1].begin();
        const auto valid = enumerate_valid_adjustment_sets(g, sets[0], b, sets[2]);
        // returned sets pass the predicate; non-returned subsets fail it
        const std::vector<std::string> pool(sets[2].begin(), sets[2].end());
        std::size_t count = 0;
        for (std::size_t bits = 0; bits < (1u << pool.size()); ++bits) {
            NodeSet z;
            for (std::size_t k = 0; k < pool.size(); ++k)
                if (bits & (1u << k)) z.insert(pool[k]);
            const bool reported = std::find(valid.begin(), valid.end(), z) != valid.end();
            CHECK(reported == is_valid_adjustment(g, sets[0], b, z));
            if (reported) ++count;
        }
        CHECK(count == valid.size());
    }
}

TEST_CASE("graph text format round trip") {
    const Dag g = test::study_generic_graph();
    std::istringstream in(format_dag(g));
    const Dag parsed = parse_dag(in);
    CHECK(parsed.num_nodes() == g.num_nodes());
    CHECK(parsed.edges() == g.edges());
    CHECK(parsed.role("X") == NodeRole::feature_block);
    CHECK(parsed.role("C2") == NodeRole::covariate);

    std::istringstream bad("A -> A\n");
    CHECK_THROWS_AS(parse_dag(bad), GraphError);
    std::istringstream cyclic("A -> B\nB -> A\n");
    CHECK_THROWS_AS(parse_dag(cyclic), GraphError);
    std::istringstream comments("# heading\nnode V role=outcome\nU -> V # tail comment\n");
    const Dag with_comments = parse_dag(comments);
    CHECK(with_comments.has_edge("U", "V"));
    CHECK(with_comments.role("V") == NodeRole::outcome);
    CHECK(with_comments.role("U") == NodeRole::other);
}

TEST_CASE("duplicate edges rejected") {
    Dag g;
    g.add_edge("A", "B");
    CHECK_THROWS_AS(g.add_edge("A", "B"), GraphError);
}
