#include <doctest.h>

#include <cmath>

#include "netfx/estimator.hpp"
#include "netfx/generators.hpp"
#include "netfx/stats.hpp"
#include "oracles.hpp"

using namespace netfx;

namespace {

Dataset example_dataset(int n, std::uint64_t seed, const SemConfig& cfg) {
    Rng net_rng(seed);
    auto net = std::make_shared<InteractionNetwork>(gen_erdos_renyi(n, 10.0 / n, net_rng));
    const FeatureComputer fc(*net, FeatureSpec::parse("frac-parents"));
    Rng data_rng(seed + 1);
    return simulate(cfg, net, fc, data_rng);
}

// fraction-of-treated-parents (order 1) or parents-of-parents (order 2),
// affinely transformed: a * x + b, with the fill value transformed as well
CustomFeature affine_frac_feature(const InteractionNetwork& net, int order, double a, double b,
                                  double fill) {
    CustomFeature f;
    f.name = "affine-frac-" + std::to_string(order);
    const int n = net.n_units();
    f.affectors.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        f.affectors[static_cast<std::size_t>(i)] =
            order == 1 ? net.parents(i) : net.second_order_set(i);
    auto sets = f.affectors;
    f.eval = [sets, a, b, fill](int i, const std::vector<std::uint8_t>& w) {
        const auto& set = sets[static_cast<std::size_t>(i)];
        if (set.empty()) return a * fill + b;
        double treated = 0.0;
        for (int j : set) treated += w[static_cast<std::size_t>(j)];
        return a * (treated / static_cast<double>(set.size())) + b;
    };
    f.mean_under_policy = [sets, a, b, fill](int i, double theta) {
        return sets[static_cast<std::size_t>(i)].empty() ? a * fill + b : a * theta + b;
    };
    return f;
}

} // namespace

TEST_CASE("Monte Carlo weights approach the closed form") {
    const InteractionNetwork small = test::example_network_small();
    const FeatureSpec spec = FeatureSpec::parse("frac-parents");
    const Weights exact = closed_form_weights(small, spec, 0.7, 0.2);
    const Weights approx = mc_weights(small, spec, 0.7, 0.2, 20000, 42);
    for (int k = 0; k < 2; ++k) {
        CHECK(approx.omega0(k) == doctest::Approx(exact.omega0(k)).epsilon(0.02));
        CHECK(approx.omega1(k) == doctest::Approx(exact.omega1(k)).epsilon(0.02));
    }

    // identical policies: exact zero with common random numbers, noisy without
    const Weights crn = mc_weights(small, spec, 0.4, 0.4, 500, 7, true);
    CHECK(crn.omega0.cwiseAbs().maxCoeff() == 0.0);
    CHECK(crn.omega1.cwiseAbs().maxCoeff() == 0.0);
    const Weights indep = mc_weights(small, spec, 0.4, 0.4, 500, 7, false);
    CHECK(indep.omega0.cwiseAbs().maxCoeff() > 0.0);
    CHECK(indep.omega0.cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("design matrix layouts") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(50, 91, cfg);

    const Design full = build_design(ds, {Variant::fully_adjusted, {"C2"}});
    CHECK(full.columns == std::vector<std::string>{"1", "X1", "W", "O1", "C2"});
    CHECK(full.alpha0_cols == std::vector<int>{0, 1});
    CHECK(full.alpha1_cols == std::vector<int>{2, 3});
    CHECK(full.z_cols == std::vector<int>{4});

    const Design naive = build_design(ds, {Variant::naive, {}});
    CHECK(naive.columns == std::vector<std::string>{"1", "W"});

    const Design conf = build_design(ds, {Variant::confounding_adjusted, {"C2"}});
    CHECK(conf.columns == std::vector<std::string>{"1", "W", "C2"});

    CHECK_THROWS_AS(build_design(ds, {Variant::fully_adjusted, {"C9"}}), DataError);

    // two-feature interference design has six columns
    Rng rng(92);
    auto net2 = std::make_shared<InteractionNetwork>(gen_lattice2d(7));
    const FeatureComputer fc2(*net2, FeatureSpec::parse("frac-parents,frac-parents2"));
    Rng data_rng(93);
    const Dataset ds2 = simulate(SemConfig::example_study(2), net2, fc2, data_rng);
    const Design interf = build_design(ds2, {Variant::interference_adjusted, {}});
    CHECK(interf.columns ==
          std::vector<std::string>{"1", "W", "X1", "X2", "O1", "O2"});
    CHECK(interf.alpha0_cols == std::vector<int>{0, 2, 3});
    CHECK(interf.alpha1_cols == std::vector<int>{1, 4, 5});
}

TEST_CASE("least squares recovers a noiseless line exactly") {
    const int n = 40;
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd y(n);
    Rng rng(94);
    for (int i = 0; i < n; ++i) {
        m(i, 0) = 1.0;
        m(i, 1) = rng.uniform(-2.0, 2.0);
        y(i) = 2.0 + 3.0 * m(i, 1);
    }
    const OlsFit fit = ols_fit(m, y);
    CHECK(std::abs(fit.coef(0) - 2.0) < 1e-10);
    CHECK(std::abs(fit.coef(1) - 3.0) < 1e-10);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-10);

    Eigen::MatrixXd dup(n, 3);
    dup.col(0) = m.col(0);
    dup.col(1) = m.col(1);
    dup.col(2) = m.col(1); // duplicated regressor
    const std::vector<std::string> names{"1", "x", "x_copy"};
    CHECK_THROWS_WITH_AS(ols_fit(dup, y, &names),
                         doctest::Contains("collinear"), NumericalError);
}

TEST_CASE("coefficient recovery on the study model") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(4800, 95, cfg);

    auto robust_se = [](const Design& design, const OlsFit& fit) {
        const Eigen::MatrixXd mtm = design.m.transpose() * design.m;
        const Eigen::MatrixXd meat = design.m.transpose() *
                                     fit.residuals.array().square().matrix().asDiagonal() *
                                     design.m;
        return Eigen::MatrixXd(mtm.inverse() * meat * mtm.inverse());
    };

    // Z = {C2}: the effect components (X, W, O) are identified; the intercept
    // absorbs the omitted C1's conditional mean and its weight cancels in the
    // plug-in effect anyway
    {
        const Design design = build_design(ds, {Variant::fully_adjusted, {"C2"}});
        const OlsFit fit = ols_fit(design.m, design.y, &design.columns);
        const Eigen::MatrixXd cov = robust_se(design, fit);
        const double truth[3] = {cfg.alpha0(1), cfg.alpha1(0), cfg.alpha1(1)};
        for (int k = 1; k <= 3; ++k) {
            const double se = std::sqrt(cov(k, k));
            CHECK(std::abs(fit.coef(k) - truth[k - 1]) <= 3.5 * se);
        }
    }

    // Z = {C1} puts the only outcome parent in the design: every alpha
    // component, intercept included, is recovered
    {
        const Design design = build_design(ds, {Variant::fully_adjusted, {"C1"}});
        const OlsFit fit = ols_fit(design.m, design.y, &design.columns);
        const Eigen::MatrixXd cov = robust_se(design, fit);
        const double truth[5] = {cfg.alpha0(0), cfg.alpha0(1), cfg.alpha1(0), cfg.alpha1(1), 1.5};
        for (int k = 0; k < 5; ++k) {
            const double se = std::sqrt(cov(k, k));
            CHECK(std::abs(fit.coef(k) - truth[k]) <= 3.5 * se);
        }
    }
}

TEST_CASE("plug-in effect arithmetic") {
    Weights w;
    w.omega0 = Eigen::Vector2d(-1.0, 0.0);
    w.omega1 = Eigen::Vector2d(1.0, 1.0);
    const Eigen::Vector2d a0(2.0, 1.0), a1(0.4, 1.1);
    CHECK(estimate_tau(a0, a1, w) == doctest::Approx(2.5));

    Weights zero;
    zero.omega0 = Eigen::Vector2d::Zero();
    zero.omega1 = Eigen::Vector2d::Zero();
    CHECK(estimate_tau(a0, a1, zero) == 0.0);

    // with alpha1 = 0 the effect telescopes to (omega0 + omega1)' alpha0
    Weights w2;
    w2.omega0 = Eigen::Vector2d(0.3, -0.2);
    w2.omega1 = Eigen::Vector2d(0.5, 0.7);
    CHECK(estimate_tau(a0, Eigen::Vector2d::Zero(), w2) ==
          doctest::Approx((w2.omega0 + w2.omega1).dot(a0)));

    Weights bad = w;
    bad.omega1 = Eigen::Vector3d::Zero();
    CHECK_THROWS_AS(estimate_tau(a0, a1, bad), ConfigError);
}

TEST_CASE("sandwich variance special cases") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(200, 96, cfg);
    const Design design = build_design(ds, {Variant::fully_adjusted, {"C2"}});
    OlsFit fit = ols_fit(design.m, design.y, &design.columns);

    const Weights w = closed_form_weights(*ds.network, *ds.feature_spec, 0.7, 0.2);
    OlsFit zero_resid = fit;
    zero_resid.residuals.setZero();
    CHECK(sandwich_variance(design, zero_resid, w) == 0.0);

    const Weights null = closed_form_weights(*ds.network, *ds.feature_spec, 0.4, 0.4);
    CHECK(sandwich_variance(design, fit, null) == 0.0);

    // unit reordering leaves the estimate unchanged
    Eigen::VectorXi perm(ds.n());
    Rng rng(97);
    for (int i = 0; i < ds.n(); ++i) perm(i) = i;
    for (int i = ds.n() - 1; i > 0; --i)
        std::swap(perm(i), perm(static_cast<int>(rng.uniform_int(0, i))));
    Design shuffled = design;
    for (int i = 0; i < ds.n(); ++i) {
        shuffled.m.row(i) = design.m.row(perm(i));
        shuffled.y(i) = design.y(perm(i));
    }
    const OlsFit fit2 = ols_fit(shuffled.m, shuffled.y);
    CHECK(sandwich_variance(shuffled, fit2, w) ==
          doctest::Approx(sandwich_variance(design, fit, w)).epsilon(1e-9));
}

TEST_CASE("sandwich agrees with the textbook robust covariance") {
    Rng rng(98);
    const int n = 2000;
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        m(i, 0) = 1.0;
        m(i, 1) = rng.uniform(0.0, 1.0);
        y(i) = 1.0 - 2.0 * m(i, 1) + rng.normal() * 0.8;
    }
    Design design;
    design.m = m;
    design.y = y;
    design.columns = {"1", "W"};
    design.alpha0_cols = {0};
    design.alpha1_cols = {1};
    const OlsFit fit = ols_fit(m, y);
    const Weights w = intercept_only_weights(1.0, 0.0);

    const Eigen::MatrixXd mtm_inv = (m.transpose() * m).inverse();
    const Eigen::MatrixXd meat =
        m.transpose() * fit.residuals.array().square().matrix().asDiagonal() * m;
    const Eigen::MatrixXd cov = mtm_inv * meat * mtm_inv; // var-hat of the coefficients
    Eigen::Vector2d v(w.omega0(0) + w.omega1(0), w.omega1(0));
    const double textbook = v.transpose() * cov * v;

    const double ours = sandwich_variance(design, fit, w) / n;
    CHECK(ours == doctest::Approx(textbook).epsilon(0.15));
    CHECK(ours == doctest::Approx(textbook).epsilon(1e-8)); // same quantity, two routes
}

TEST_CASE("confidence interval arithmetic") {
    const auto [lo, hi] = confidence_interval(1.0, 4.0, 400, 0.95);
    CHECK(lo == doctest::Approx(0.8040).epsilon(1e-4));
    CHECK(hi == doctest::Approx(1.1960).epsilon(1e-4));

    const auto degenerate = confidence_interval(0.7, 0.0, 100, 0.95);
    CHECK(degenerate.first == 0.7);
    CHECK(degenerate.second == 0.7);

    const auto wide = confidence_interval(1.0, 4.0, 400, 0.99);
    CHECK(wide.first < lo);
    CHECK(wide.second > hi);

    CHECK_THROWS_AS(confidence_interval(1.0, 4.0, 400, 1.5), ConfigError);
}

TEST_CASE("full pipeline selects the smallest valid adjustment set") {
    const SemConfig cfg = SemConfig::example_study(1);
    Dataset ds = example_dataset(4800, 99, cfg);

    // C1 unobserved: drop its column
    Dataset observed = ds;
    observed.C = ds.C.rightCols(2);
    observed.c_names = {"C2", "C3"};

    EstimateOptions options;
    options.pi = 0.7;
    options.eta = 0.2;
    const EstimateReport report =
        adjust_and_estimate(observed, test::study_generic_graph(), options);
    CHECK(report.adjustment == std::vector<std::string>{"C2"});
    CHECK(report.adjustment_auto_selected);
    const double se = std::sqrt(report.sigma2_hat / report.n_units);
    CHECK(std::abs(report.tau_hat - 1.195) <= 3.0 * se);
    CHECK(report.d_max > 0);
    CHECK(report.ci.first <= report.tau_hat);
    CHECK(report.ci.second >= report.tau_hat);

    // nothing observed: identification fails loudly
    Dataset blind = ds;
    blind.C.resize(ds.n(), 0);
    blind.c_names.clear();
    CHECK_THROWS_AS(adjust_and_estimate(blind, test::study_generic_graph(), options),
                    IdentifiabilityError);
}

TEST_CASE("unconfounded graph selects the empty set and matches the interference fit") {
    SemConfig cfg = SemConfig::example_study(1);
    cfg.treat_coef.setZero(); // treatment no longer depends on the covariates
    const Dataset ds = example_dataset(2000, 100, cfg);

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
    g.add_edge("W", "Y");
    g.add_edge("W", "O");
    g.add_edge("X", "O");
    g.add_edge("X", "Y");
    g.add_edge("O", "Y");
    g.validate();

    EstimateOptions options;
    options.pi = 0.7;
    options.eta = 0.2;
    const EstimateReport report = adjust_and_estimate(ds, g, options);
    CHECK(report.adjustment.empty());

    const Weights w = closed_form_weights(*ds.network, *ds.feature_spec, 0.7, 0.2);
    const EstimateReport interference =
        estimate_variant(ds, {Variant::interference_adjusted, {}}, options, w);
    CHECK(report.tau_hat == doctest::Approx(interference.tau_hat).epsilon(1e-10));
}

TEST_CASE("invalid requested adjustment set is rejected") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(500, 101, cfg);
    EstimateOptions options;
    options.pi = 0.7;
    options.eta = 0.2;
    options.adjustment = std::vector<std::string>{"C3"}; // leaves the C1 backdoor open
    CHECK_THROWS_AS(adjust_and_estimate(ds, test::study_generic_graph(), options),
                    IdentifiabilityError);
}

TEST_CASE("effect estimate is invariant to affine feature transformations") {
    for (int p_case = 0; p_case < 2; ++p_case) {
        const int p = p_case + 1;
        Rng net_rng(102 + p_case);
        auto net = std::make_shared<InteractionNetwork>(
            p == 1 ? gen_erdos_renyi(600, 10.0 / 600, net_rng) : gen_lattice2d(24));
        const FeatureSpec base_spec =
            FeatureSpec::parse(p == 1 ? "frac-parents" : "frac-parents,frac-parents2");
        const SemConfig cfg = SemConfig::example_study(p);
        Rng data_rng(201 + p_case);
        const Dataset ds = simulate(cfg, net, FeatureComputer(*net, base_spec), data_rng);

        const std::vector<double> scale{1.7, 0.6};
        const std::vector<double> shift{-0.3, 0.45};
        Dataset transformed = ds;
        for (int k = 0; k < p; ++k) {
            transformed.X.col(k) = scale[static_cast<std::size_t>(k)] * ds.X.col(k).array() +
                                   shift[static_cast<std::size_t>(k)];
        }
        transformed.O = transformed.X.array().colwise() * transformed.W.array();
        std::vector<FeatureKind> kinds;
        for (int k = 0; k < p; ++k)
            kinds.emplace_back(affine_frac_feature(*net, k + 1, scale[static_cast<std::size_t>(k)],
                                                   shift[static_cast<std::size_t>(k)], 0.0));
        transformed.feature_spec = FeatureSpec(kinds);

        EstimateOptions options;
        options.pi = 0.7;
        options.eta = 0.2;
        const Weights w_base = closed_form_weights(*ds.network, *ds.feature_spec, 0.7, 0.2);
        const Weights w_trans =
            closed_form_weights(*transformed.network, *transformed.feature_spec, 0.7, 0.2);
        const RegressorSpec spec{Variant::fully_adjusted, {"C2"}};
        const EstimateReport base = estimate_variant(ds, spec, options, w_base);
        const EstimateReport trans = estimate_variant(transformed, spec, options, w_trans);
        CHECK(std::abs(base.tau_hat - trans.tau_hat) < 1e-8);
    }
}

TEST_CASE("scaling the response scales the estimate") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(300, 103, cfg);
    Dataset scaled = ds;
    scaled.Y *= -2.5;
    EstimateOptions options;
    options.pi = 0.7;
    options.eta = 0.2;
    const Weights w = closed_form_weights(*ds.network, *ds.feature_spec, 0.7, 0.2);
    const RegressorSpec spec{Variant::fully_adjusted, {"C2"}};
    const EstimateReport a = estimate_variant(ds, spec, options, w);
    const EstimateReport b = estimate_variant(scaled, spec, options, w);
    CHECK(b.tau_hat == doctest::Approx(-2.5 * a.tau_hat).epsilon(1e-10));
}

TEST_CASE("valid adjustment sets recover the effect, invalid ones do not") {
    Rng coef_rng(104);
    const int n = 100000;
    for (int structure = 0; structure < 2; ++structure) {
        SemConfig cfg = SemConfig::example_study(1);
        const double g1 = coef_rng.uniform(1.0, 2.0);
        const double g3 = structure == 0 ? 0.0 : coef_rng.uniform(1.0, 2.0);
        cfg.gamma = Eigen::Vector3d(g1, 0.0, g3);

        Dag g = test::study_generic_graph();
        if (structure == 1) g.add_edge("C3", "Y");

        const NodeSet exposure{"X", "W", "O"};
        const NodeSet valid_set = structure == 0 ? NodeSet{"C2"} : NodeSet{"C2", "C3"};
        const NodeSet invalid_set = structure == 0 ? NodeSet{"C3"} : NodeSet{"C2"};
        REQUIRE(is_valid_adjustment(g, exposure, "Y", valid_set));
        REQUIRE_FALSE(is_valid_adjustment(g, exposure, "Y", invalid_set));

        const Dataset ds = example_dataset(n, 300 + structure, cfg);
        const double truth = true_tau(cfg, closed_form_weights(*ds.network, *ds.feature_spec,
                                                               0.7, 0.2));
        EstimateOptions options;
        options.pi = 0.7;
        options.eta = 0.2;
        const Weights w = closed_form_weights(*ds.network, *ds.feature_spec, 0.7, 0.2);

        const EstimateReport good = estimate_variant(
            ds, {Variant::fully_adjusted, std::vector<std::string>(valid_set.begin(),
                                                                   valid_set.end())},
            options, w);
        const double se_good = std::sqrt(good.sigma2_hat / n);
        CHECK(std::abs(good.tau_hat - truth) <= 3.0 * se_good);

        const EstimateReport bad = estimate_variant(
            ds, {Variant::fully_adjusted, std::vector<std::string>(invalid_set.begin(),
                                                                   invalid_set.end())},
            options, w);
        const double se_bad = std::sqrt(bad.sigma2_hat / n);
        CHECK(std::abs(bad.tau_hat - truth) > 5.0 * se_bad);
    }
}

TEST_CASE("report serialization carries the inputs") {
    const SemConfig cfg = SemConfig::example_study(1);
    const Dataset ds = example_dataset(300, 105, cfg);
    EstimateOptions options;
    options.pi = 0.7;
    options.eta = 0.2;
    Dataset observed = ds;
    observed.C = ds.C.rightCols(2);
    observed.c_names = {"C2", "C3"};
    const EstimateReport report =
        adjust_and_estimate(observed, test::study_generic_graph(), options);
    const std::string json = report_to_json(report);
    CHECK(json.find("\"tau_hat\"") != std::string::npos);
    CHECK(json.find("\"closed-form\"") != std::string::npos);
    CHECK(json.find("\"adjustment\"") != std::string::npos);
    CHECK(json.find("\"d_max\"") != std::string::npos);
}
