#include <doctest.h>

#include <cmath>
#include <sstream>

#include "netfx/depgraph.hpp"
#include "netfx/generators.hpp"
#include "netfx/sem.hpp"
#include "netfx/stats.hpp"
#include "netfx/weights.hpp"
#include "oracles.hpp"

using namespace netfx;

TEST_CASE("paired Erdos-Renyi draws") {
    Rng rng(3101);
    CHECK(gen_erdos_renyi(20, 0.0, rng).n_edges() == 0);
    CHECK(gen_erdos_renyi(3, 1.0, rng).n_edges() == 6);

    for (int trial = 0; trial < 20; ++trial) {
        const InteractionNetwork net = gen_erdos_renyi(60, rng.uniform(0.0, 0.5), rng);
        CHECK(net.adjacency_symmetric());
    }

    // mean in-degree under p = 10/N
    const int n = 250;
    const double p = 10.0 / n;
    const int draws = 60;
    std::vector<double> means;
    for (int d = 0; d < draws; ++d) {
        const InteractionNetwork net = gen_erdos_renyi(n, p, rng);
        means.push_back(static_cast<double>(net.n_edges()) / n); // in-degree average
    }
    const double expected = p * (n - 1);
    const double se = std::sqrt(variance(means) / draws);
    CHECK(std::abs(mean(means) - expected) <= 3.0 * se + 1e-9);
}

TEST_CASE("family networks are unions of small cliques") {
    Rng rng(3102);
    CHECK(gen_family(1, rng).n_edges() == 0);

    const InteractionNetwork net = gen_family(157, rng);
    // walk the components: each must be a bidirectional clique of size <= 6
    std::vector<int> component(157, -1);
    int n_components = 0;
    for (int i = 0; i < 157; ++i) {
        if (component[static_cast<std::size_t>(i)] >= 0) continue;
        std::vector<int> stack{i};
        std::vector<int> members;
        component[static_cast<std::size_t>(i)] = n_components;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int u : net.children(v))
                if (component[static_cast<std::size_t>(u)] < 0) {
                    component[static_cast<std::size_t>(u)] = n_components;
                    stack.push_back(u);
                }
        }
        CHECK(members.size() <= 6);
        for (int a : members)
            for (int b : members)
                if (a != b) CHECK(net.has_edge(a, b));
        ++n_components;
    }

    // dependency-degree bound from the clique size
    const auto d = dependency_graph(net, FeatureSpec::parse("frac-parents"));
    CHECK(d.max_degree() <= 5);
}

TEST_CASE("lattice generator") {
    CHECK(gen_lattice2d(1).n_units() == 1);
    CHECK(gen_lattice2d(1).n_edges() == 0);
    const InteractionNetwork four = gen_lattice2d(2);
    CHECK(four.n_units() == 4);
    CHECK(four.n_edges() == 4);
    for (int side : {3, 7, 17})
        CHECK(gen_lattice2d(side).n_edges() ==
              static_cast<std::size_t>(2 * side * (side - 1)));

    Rng rng(1);
    CHECK_THROWS_AS(generate_network(Lattice2d{}, 300, rng), ConfigError);
    CHECK(generate_network(Lattice2d{}, 289, rng).n_units() == 289);
}

TEST_CASE("probability expressions") {
    CHECK(PExpr::parse("0.2").eval(100) == doctest::Approx(0.2));
    CHECK(PExpr::parse("10/N").eval(200) == doctest::Approx(0.05));
    CHECK(PExpr::parse("N^-2/3").eval(1000) == doctest::Approx(std::pow(1000.0, -2.0 / 3.0)));
    CHECK_THROWS_AS(PExpr::parse("1.5"), ConfigError);
}

TEST_CASE("degenerate simulation settings") {
    const InteractionNetwork net = test::example_network_small();
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");

    SemConfig cfg = SemConfig::example_study(1);
    cfg.alpha0.setZero();
    cfg.alpha1.setZero();
    cfg.gamma.setZero();
    for (auto& noise : cfg.c_noise) noise = NoiseSpec{NoiseSpec::Kind::none, 0.0};
    cfg.y_noise = NoiseSpec{NoiseSpec::Kind::none, 0.0};
    Rng rng(3103);
    const Dataset ds = simulate(cfg, net, spec, rng);
    CHECK(ds.Y.cwiseAbs().maxCoeff() == 0.0);

    // with gamma = (1.5, 0, 0) and no outcome noise, Y - 1.5 C1 is exactly the
    // linear feature-and-treatment term
    SemConfig cfg2 = SemConfig::example_study(1);
    cfg2.y_noise = NoiseSpec{NoiseSpec::Kind::none, 0.0};
    Rng rng2(3104);
    const Dataset ds2 = simulate(cfg2, net, spec, rng2);
    for (int i = 0; i < ds2.n(); ++i) {
        const double expect = cfg2.alpha0(0) + cfg2.alpha0(1) * ds2.X(i, 0) +
                              cfg2.alpha1(0) * ds2.W(i) + cfg2.alpha1(1) * ds2.O(i, 0);
        CHECK(ds2.Y(i) - 1.5 * ds2.C(i, 0) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("simulation is bit-reproducible for a fixed seed") {
    Rng net_rng(3105);
    const InteractionNetwork net = gen_erdos_renyi(80, 0.1, net_rng);
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");
    const SemConfig cfg = SemConfig::example_study(1);
    Rng a(999), b(999);
    const Dataset da = simulate(cfg, net, spec, a);
    const Dataset db = simulate(cfg, net, spec, b);
    CHECK(da.C == db.C);
    CHECK(da.W == db.W);
    CHECK(da.X == db.X);
    CHECK(da.O == db.O);
    CHECK(da.Y == db.Y);
}

TEST_CASE("error moments match the configuration") {
    const int n = 10000;
    Rng net_rng(3106);
    const InteractionNetwork net = gen_erdos_renyi(n, 10.0 / n, net_rng);
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");
    const SemConfig cfg = SemConfig::example_study(1);
    Rng rng(3107);
    const Dataset ds = simulate(cfg, net, spec, rng);

    // reconstruct the error draws from the structural equations
    std::vector<std::vector<double>> eps(4);
    for (int i = 0; i < n; ++i) {
        eps[0].push_back(ds.C(i, 0) + 2.0);
        eps[1].push_back(ds.C(i, 1) - 2.0 * ds.C(i, 0));
        eps[2].push_back(ds.C(i, 2) - 0.5);
        const double lin = cfg.alpha0(0) + cfg.alpha0(1) * ds.X(i, 0) +
                           cfg.alpha1(0) * ds.W(i) + cfg.alpha1(1) * ds.O(i, 0) +
                           1.5 * ds.C(i, 0);
        eps[3].push_back(ds.Y(i) - lin);
    }
    for (const auto& e : eps) {
        const double se = std::sqrt(variance(e) / n);
        CHECK(std::abs(mean(e)) <= 3.0 * se);
        CHECK(variance(e) == doctest::Approx(1.0).epsilon(0.10));
    }
    // the outcome noise is uniform: bounded support
    for (double v : eps[3]) CHECK(std::abs(v) <= std::sqrt(3.0) + 1e-9);
}

TEST_CASE("closed-form target effect values") {
    const InteractionNetwork net = test::example_network_small(); // every unit has parents
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");
    SemConfig cfg = SemConfig::example_study(1);

    const Weights gate = closed_form_weights(net, spec, 1.0, 0.0);
    CHECK(gate.omega0(0) == doctest::Approx(-1.0));
    CHECK(gate.omega0(1) == doctest::Approx(0.0));
    CHECK(gate.omega1(0) == doctest::Approx(1.0));
    CHECK(gate.omega1(1) == doctest::Approx(1.0));
    CHECK(true_tau(cfg, gate) == doctest::Approx(2.5));

    const Weights partial = closed_form_weights(net, spec, 0.7, 0.2);
    CHECK(partial.omega0(0) == doctest::Approx(-0.5));
    CHECK(partial.omega0(1) == doctest::Approx(0.05));
    CHECK(partial.omega1(0) == doctest::Approx(0.5));
    CHECK(partial.omega1(1) == doctest::Approx(0.45));
    CHECK(true_tau(cfg, partial) == doctest::Approx(1.195));

    const Weights null = closed_form_weights(net, spec, 0.4, 0.4);
    CHECK(true_tau(cfg, null) == 0.0);

    Weights wrong = gate;
    wrong.omega0 = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(true_tau(cfg, wrong), ConfigError);
}

TEST_CASE("Monte Carlo oracle agrees with the closed form") {
    Rng net_rng(3108);
    const SemConfig cfg = SemConfig::example_study(1);
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");

    const InteractionNetwork er = gen_erdos_renyi(300, 10.0 / 300, net_rng);
    const double truth = true_tau(cfg, closed_form_weights(er, spec, 0.7, 0.2));
    Rng mc_rng(3109);
    const McTau mc = mc_tau_oracle(cfg, er, spec, 0.7, 0.2, 400, mc_rng);
    CHECK(std::abs(mc.estimate - truth) <= 3.0 * mc.std_error);

    // two-feature lattice configuration
    const FeatureSpec both = FeatureSpec::parse("frac-parents,frac-parents2");
    const SemConfig lattice_cfg = SemConfig::example_study(2);
    const InteractionNetwork lattice = gen_lattice2d(17);
    const double truth2 = true_tau(lattice_cfg, closed_form_weights(lattice, both, 0.5, 0.1));
    Rng mc_rng2(3110);
    const McTau mc2 = mc_tau_oracle(lattice_cfg, lattice, both, 0.5, 0.1, 400, mc_rng2);
    CHECK(std::abs(mc2.estimate - truth2) <= 3.0 * mc2.std_error);

    // identical policies cancel
    Rng mc_rng3(3111);
    const McTau null = mc_tau_oracle(cfg, er, spec, 0.3, 0.3, 200, mc_rng3);
    CHECK(std::abs(null.estimate) <= 3.0 * null.std_error + 1e-9);

    // a pure intercept shift cancels in the contrast
    SemConfig intercept_only = cfg;
    intercept_only.alpha0 << 7.0, 0.0;
    intercept_only.alpha1.setZero();
    Rng mc_rng4(3112);
    const McTau zero = mc_tau_oracle(intercept_only, er, spec, 0.9, 0.1, 200, mc_rng4);
    CHECK(std::abs(zero.estimate) <= 3.0 * zero.std_error + 1e-9);
}

TEST_CASE("dataset CSV round trip") {
    Rng net_rng(3113);
    const InteractionNetwork net = gen_erdos_renyi(40, 0.2, net_rng);
    const SemConfig cfg = SemConfig::example_study(1);
    Rng rng(3114);
    const Dataset ds = simulate(cfg, net, FeatureSpec::parse("frac-parents"), rng);

    std::ostringstream out;
    write_dataset_csv(ds, out);
    std::istringstream in(out.str());
    const Dataset back = read_dataset_csv(in);
    CHECK(back.n() == ds.n());
    CHECK(back.c_names == ds.c_names);
    CHECK((back.C - ds.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.Y - ds.Y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);

    // binary treatment enforced on load
    std::istringstream damaged("unit,C1,W,X1,O1,Y\n1,0.5,0.7,0.2,0.14,1.0\n");
    CHECK_THROWS_AS(read_dataset_csv(damaged), DataError);
}
