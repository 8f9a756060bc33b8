#include "netfx/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netfx/depgraph.hpp"
#include "netfx/stats.hpp"

namespace netfx {

Variant parse_variant(const std::string& text) {
    if (text == "naive") return Variant::naive;
    if (text == "confounding") return Variant::confounding_adjusted;
    if (text == "interference") return Variant::interference_adjusted;
    if (text == "full") return Variant::fully_adjusted;
    throw ConfigError("unknown estimator variant '" + text +
                      "' (expected naive|confounding|interference|full)");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::naive: return "naive";
        case Variant::confounding_adjusted: return "confounding";
        case Variant::interference_adjusted: return "interference";
        case Variant::fully_adjusted: return "full";
    }
    return "full";
}

Design build_design(const Dataset& ds, const RegressorSpec& spec) {
    ds.validate();
    const int n = ds.n();
    const int p = ds.p();

    std::vector<int> z_ix;
    if (spec.variant == Variant::confounding_adjusted || spec.variant == Variant::fully_adjusted) {
        for (const auto& name : spec.adjustment) {
            const auto ix = ds.covariate_index(name);
            if (!ix) throw DataError("adjustment column '" + name + "' not in the dataset");
            z_ix.push_back(*ix);
        }
    }

    Design d;
    d.y = ds.Y;
    auto push_intercept = [&](Eigen::MatrixXd& m, int col) {
        m.col(col).setOnes();
        d.columns.emplace_back("1");
    };

    switch (spec.variant) {
        case Variant::naive: {
            d.m.resize(n, 2);
            push_intercept(d.m, 0);
            d.m.col(1) = ds.W;
            d.columns.emplace_back("W");
            d.alpha0_cols = {0};
            d.alpha1_cols = {1};
            break;
        }
        case Variant::confounding_adjusted: {
            d.m.resize(n, 2 + static_cast<int>(z_ix.size()));
            push_intercept(d.m, 0);
            d.m.col(1) = ds.W;
            d.columns.emplace_back("W");
            int col = 2;
            for (std::size_t k = 0; k < z_ix.size(); ++k, ++col) {
                d.m.col(col) = ds.C.col(z_ix[k]);
                d.columns.push_back(spec.adjustment[k]);
                d.z_cols.push_back(col);
            }
            d.alpha0_cols = {0};
            d.alpha1_cols = {1};
            break;
        }
        case Variant::interference_adjusted: {
            d.m.resize(n, 2 + 2 * p);
            push_intercept(d.m, 0);
            d.m.col(1) = ds.W;
            d.columns.emplace_back("W");
            for (int k = 0; k < p; ++k) {
                d.m.col(2 + k) = ds.X.col(k);
                d.columns.push_back("X" + std::to_string(k + 1));
            }
            for (int k = 0; k < p; ++k) {
                d.m.col(2 + p + k) = ds.O.col(k);
                d.columns.push_back("O" + std::to_string(k + 1));
            }
            d.alpha0_cols.push_back(0);
            for (int k = 0; k < p; ++k) d.alpha0_cols.push_back(2 + k);
            d.alpha1_cols.push_back(1);
            for (int k = 0; k < p; ++k) d.alpha1_cols.push_back(2 + p + k);
            break;
        }
        case Variant::fully_adjusted: {
            d.m.resize(n, 2 + 2 * p + static_cast<int>(z_ix.size()));
            push_intercept(d.m, 0);
            for (int k = 0; k < p; ++k) {
                d.m.col(1 + k) = ds.X.col(k);
                d.columns.push_back("X" + std::to_string(k + 1));
            }
            d.m.col(1 + p) = ds.W;
            d.columns.emplace_back("W");
            for (int k = 0; k < p; ++k) {
                d.m.col(2 + p + k) = ds.O.col(k);
                d.columns.push_back("O" + std::to_string(k + 1));
            }
            int col = 2 + 2 * p;
            for (std::size_t k = 0; k < z_ix.size(); ++k, ++col) {
                d.m.col(col) = ds.C.col(z_ix[k]);
                d.columns.push_back(spec.adjustment[k]);
                d.z_cols.push_back(col);
            }
            d.alpha0_cols.push_back(0);
            for (int k = 0; k < p; ++k) d.alpha0_cols.push_back(1 + k);
            d.alpha1_cols.push_back(1 + p);
            for (int k = 0; k < p; ++k) d.alpha1_cols.push_back(2 + p + k);
            break;
        }
    }
    return d;
}

OlsFit ols_fit(const Eigen::MatrixXd& m, const Eigen::VectorXd& y,
               const std::vector<std::string>* column_names) {
    if (m.rows() != y.size()) throw DataError("design and response lengths differ");
    if (m.rows() < m.cols())
        throw NumericalError("design has fewer rows than columns (" + std::to_string(m.rows()) +
                             " x " + std::to_string(m.cols()) + ")");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd r_full =
        qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    const double r_max = std::abs(r_full(0, 0));
    const double r_min = std::abs(r_full(m.cols() - 1, m.cols() - 1));
    const double cond = r_min > 0.0 ? r_max / r_min : std::numeric_limits<double>::infinity();

    constexpr double kConditionLimit = 1e10;
    if (!(cond < kConditionLimit)) {
        std::ostringstream msg;
        msg << "singular design (condition estimate " << cond << ")";
        if (column_names) {
            // columns whose pivot collapsed relative to the leading one
            const auto& perm = qr.colsPermutation().indices();
            msg << "; collinear columns:";
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                if (!(std::abs(r_full(k, k)) * kConditionLimit > r_max))
                    msg << " " << (*column_names)[static_cast<std::size_t>(perm(k))];
        }
        throw NumericalError(msg.str());
    }

    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.residuals = y - m * fit.coef;
    fit.condition_number = cond;
    fit.r = r_full;
    fit.permutation = qr.colsPermutation().indices();
    return fit;
}

Eigen::VectorXd solve_normal(const OlsFit& fit, const Eigen::VectorXd& v) {
    const Eigen::Index k = fit.r.cols();
    if (v.size() != k) throw DataError("solve_normal: vector length mismatch");
    // M'M = P R'R P'  =>  (M'M)^{-1} v = P R^{-1} R^{-T} P' v
    Eigen::VectorXd permuted(k);
    for (Eigen::Index i = 0; i < k; ++i) permuted(i) = v(fit.permutation(i));
    Eigen::VectorXd t = fit.r.transpose().triangularView<Eigen::Lower>().solve(permuted);
    Eigen::VectorXd s = fit.r.triangularView<Eigen::Upper>().solve(t);
    Eigen::VectorXd out(k);
    for (Eigen::Index i = 0; i < k; ++i) out(fit.permutation(i)) = s(i);
    return out;
}

double estimate_tau(const Eigen::VectorXd& alpha0_hat, const Eigen::VectorXd& alpha1_hat,
                    const Weights& weights) {
    if (alpha0_hat.size() != weights.omega0.size() || alpha1_hat.size() != weights.omega1.size())
        throw ConfigError("alpha slice lengths do not match the weights");
    return weights.omega0.dot(alpha0_hat) + weights.omega1.dot(alpha0_hat + alpha1_hat);
}

double sandwich_variance(const Design& design, const OlsFit& fit, const Weights& weights) {
    const Eigen::Index k = design.m.cols();
    const double n = static_cast<double>(design.m.rows());
    if (static_cast<int>(design.alpha0_cols.size()) != weights.omega0.size())
        throw ConfigError("weights do not match the design's alpha slots");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    for (std::size_t s = 0; s < design.alpha0_cols.size(); ++s)
        v(design.alpha0_cols[s]) = weights.omega0(static_cast<Eigen::Index>(s)) +
                                   weights.omega1(static_cast<Eigen::Index>(s));
    for (std::size_t s = 0; s < design.alpha1_cols.size(); ++s)
        v(design.alpha1_cols[s]) = weights.omega1(static_cast<Eigen::Index>(s));

    // u = (M'M/N)^{-1} v, then sigma2 = u' (M' diag(res^2) M / N) u
    const Eigen::VectorXd u = n * solve_normal(fit, v);
    const Eigen::VectorXd mu = design.m * u;
    const double sigma2 = (fit.residuals.array().square() * mu.array().square()).sum() / n;
    return sigma2;
}

std::pair<double, double> confidence_interval(double tau_hat, double sigma2_hat, int n,
                                              double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must be in (0,1)");
    if (sigma2_hat < 0.0) throw NumericalError("negative variance estimate");
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    const double half = z * std::sqrt(sigma2_hat / static_cast<double>(n));
    return {tau_hat - half, tau_hat + half};
}

namespace {

Weights feature_weights_for(const Dataset& ds, const EstimateOptions& options) {
    if (!ds.network || !ds.feature_spec)
        throw ConfigError("dataset carries no network/feature spec; weights for feature-based "
                          "variants need them");
    const FeatureComputer fc(*ds.network, *ds.feature_spec);
    if (options.prefer_closed_form && ds.feature_spec->has_closed_form())
        return closed_form_weights(fc, options.pi, options.eta);
    return mc_weights(fc, options.pi, options.eta, options.mc_reps, options.mc_seed);
}

} // namespace

EstimateReport estimate_variant(const Dataset& ds, const RegressorSpec& spec,
                                const EstimateOptions& options, const Weights& weights) {
    const Design design = build_design(ds, spec);
    const OlsFit fit = ols_fit(design.m, design.y, &design.columns);

    EstimateReport report;
    report.pi = options.pi;
    report.eta = options.eta;
    report.variant = spec.variant;
    report.n_units = ds.n();
    report.columns = design.columns;
    report.alpha_full_hat = fit.coef;
    report.alpha0_hat.resize(static_cast<Eigen::Index>(design.alpha0_cols.size()));
    for (std::size_t s = 0; s < design.alpha0_cols.size(); ++s)
        report.alpha0_hat(static_cast<Eigen::Index>(s)) = fit.coef(design.alpha0_cols[s]);
    report.alpha1_hat.resize(static_cast<Eigen::Index>(design.alpha1_cols.size()));
    for (std::size_t s = 0; s < design.alpha1_cols.size(); ++s)
        report.alpha1_hat(static_cast<Eigen::Index>(s)) = fit.coef(design.alpha1_cols[s]);
    report.tau_hat = estimate_tau(report.alpha0_hat, report.alpha1_hat, weights);
    report.sigma2_hat = sandwich_variance(design, fit, weights);
    report.ci_level = options.ci_level;
    report.ci = confidence_interval(report.tau_hat, report.sigma2_hat, ds.n(), options.ci_level);
    report.adjustment = spec.adjustment;
    report.weights = weights;
    report.condition_number = fit.condition_number;

    if (options.compute_d_max && ds.network && ds.feature_spec) {
        report.d_max = dependency_graph(*ds.network, *ds.feature_spec).max_degree();
        const FeatureComputer fc(*ds.network, *ds.feature_spec);
        int zero = 0;
        for (int k = 0; k < fc.p(); ++k) zero = std::max(zero, fc.empty_set_count(k));
        report.zero_affector_units = zero;
    }
    return report;
}

EstimateReport adjust_and_estimate(const Dataset& ds, const Dag& generic,
                                   const EstimateOptions& options) {
    const auto feature_nodes = generic.nodes_with_role(NodeRole::feature_block);
    const auto treatment_nodes = generic.nodes_with_role(NodeRole::treatment);
    const auto interaction_nodes = generic.nodes_with_role(NodeRole::interaction_block);
    const auto outcome_nodes = generic.nodes_with_role(NodeRole::outcome);
    if (treatment_nodes.size() != 1 || outcome_nodes.size() != 1 || feature_nodes.size() != 1 ||
        interaction_nodes.size() != 1)
        throw GraphError("generic graph must contain exactly one treatment, outcome, "
                         "feature-block and interaction-block node");

    NodeSet exposure(feature_nodes.begin(), feature_nodes.end());
    exposure.insert(treatment_nodes.front());
    exposure.insert(interaction_nodes.front());
    const std::string outcome = outcome_nodes.front();

    // candidates: covariate nodes of the graph observed as dataset columns
    NodeSet candidates;
    for (const auto& node : generic.nodes_with_role(NodeRole::covariate))
        if (ds.covariate_index(node)) candidates.insert(node);

    std::vector<std::string> adjustment;
    bool auto_selected = false;
    if (options.adjustment) {
        adjustment = *options.adjustment;
        NodeSet z(adjustment.begin(), adjustment.end());
        for (const auto& name : adjustment) {
            if (!generic.has_node(name))
                throw GraphError("adjustment node '" + name + "' not in the generic graph");
            if (!ds.covariate_index(name))
                throw DataError("adjustment column '" + name + "' not observed in the dataset");
        }
        if (!is_valid_adjustment(generic, exposure, outcome, z))
            throw IdentifiabilityError("requested adjustment set is not valid relative to the "
                                       "exposure blocks and outcome in the generic graph");
    } else {
        const auto sets = enumerate_valid_adjustment_sets(generic, exposure, outcome, candidates);
        if (sets.empty())
            throw IdentifiabilityError(
                "no valid adjustment set among the observed covariates; the effect is not "
                "identified by covariate adjustment in this graph");
        adjustment.assign(sets.front().begin(), sets.front().end());
        auto_selected = true;
    }

    const Weights weights = feature_weights_for(ds, options);
    RegressorSpec spec{Variant::fully_adjusted, adjustment};
    EstimateReport report = estimate_variant(ds, spec, options, weights);
    report.adjustment_auto_selected = auto_selected;
    if (ds.feature_spec)
        report.y_noise_note = "uniform outcome noise uses the mean-zero, variance-matched "
                              "convention Uniform(-sqrt(3 v), +sqrt(3 v))";
    return report;
}

std::string report_to_json(const EstimateReport& report) {
    nlohmann::json j;
    j["pi"] = report.pi;
    j["eta"] = report.eta;
    j["variant"] = to_string(report.variant);
    j["n_units"] = report.n_units;
    j["columns"] = report.columns;
    j["alpha_full_hat"] = std::vector<double>(report.alpha_full_hat.begin(),
                                              report.alpha_full_hat.end());
    j["alpha0_hat"] = std::vector<double>(report.alpha0_hat.begin(), report.alpha0_hat.end());
    j["alpha1_hat"] = std::vector<double>(report.alpha1_hat.begin(), report.alpha1_hat.end());
    j["tau_hat"] = report.tau_hat;
    j["sigma2_hat"] = report.sigma2_hat;
    j["ci_level"] = report.ci_level;
    j["ci"] = {report.ci.first, report.ci.second};
    j["adjustment"] = report.adjustment;
    j["adjustment_auto_selected"] = report.adjustment_auto_selected;
    j["weights"]["omega0"] =
        std::vector<double>(report.weights.omega0.begin(), report.weights.omega0.end());
    j["weights"]["omega1"] =
        std::vector<double>(report.weights.omega1.begin(), report.weights.omega1.end());
    j["weights"]["provenance"] =
        report.weights.provenance.kind == WeightProvenance::Kind::closed_form ? "closed-form"
                                                                              : "monte-carlo";
    if (report.weights.provenance.kind == WeightProvenance::Kind::monte_carlo) {
        j["weights"]["mc_reps"] = report.weights.provenance.reps;
        j["weights"]["mc_seed"] = report.weights.provenance.seed;
        j["weights"]["common_random_numbers"] = report.weights.provenance.common_random_numbers;
    }
    j["diagnostics"]["condition_number"] = report.condition_number;
    j["diagnostics"]["d_max"] = report.d_max;
    j["diagnostics"]["zero_affector_units"] = report.zero_affector_units;
    if (!report.y_noise_note.empty()) j["notes"].push_back(report.y_noise_note);
    return j.dump(2);
}

} // namespace netfx
