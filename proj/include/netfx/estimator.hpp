#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netfx/graph.hpp"
#include "netfx/sem.hpp"
#include "netfx/weights.hpp"

namespace netfx {

enum class Variant {
    naive,                 // (1, W)
    confounding_adjusted,  // (1, W, Z)
    interference_adjusted, // (1, W, X, O)
    fully_adjusted,        // (1, X, W, O, Z)
};

Variant parse_variant(const std::string& text);
std::string to_string(Variant v);

struct RegressorSpec {
    Variant variant = Variant::fully_adjusted;
    std::vector<std::string> adjustment; // covariate columns, used by the adjusted variants
};

// Design matrix plus the column bookkeeping that makes the alpha slices and
// the sandwich contrast vector unambiguous. alpha0 slots follow (1, X1..XP),
// alpha1 slots follow (W, O1..OP).
struct Design {
    Eigen::MatrixXd m;
    Eigen::VectorXd y;
    std::vector<std::string> columns;
    std::vector<int> alpha0_cols;
    std::vector<int> alpha1_cols;
    std::vector<int> z_cols;

    int p() const { return static_cast<int>(alpha0_cols.size()) - 1; }
};

Design build_design(const Dataset& ds, const RegressorSpec& spec);

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double condition_number = 0.0;

    // pivoted-QR factor retained for the sandwich: M'M = P R'R P'
    Eigen::MatrixXd r;
    Eigen::VectorXi permutation;
};

// Least squares through a column-pivoted Householder QR; designs whose
// condition estimate exceeds 1e10 raise NumericalError naming the columns
// that pivoted last (the collinear suspects).
OlsFit ols_fit(const Eigen::MatrixXd& m, const Eigen::VectorXd& y,
               const std::vector<std::string>* column_names = nullptr);

// (M'M)^{-1} v via two triangular solves against the stored factor
Eigen::VectorXd solve_normal(const OlsFit& fit, const Eigen::VectorXd& v);

double estimate_tau(const Eigen::VectorXd& alpha0_hat, const Eigen::VectorXd& alpha1_hat,
                    const Weights& weights);

// sigma2 = v' (M'M/N)^{-1} (M' diag(res^2) M / N) (M'M/N)^{-1} v with
// v = (omega0+omega1 on the alpha0 slots, omega1 on the alpha1 slots, 0 on Z).
double sandwich_variance(const Design& design, const OlsFit& fit, const Weights& weights);

// tau_hat +- z_{1-(1-level)/2} sqrt(sigma2 / n)
std::pair<double, double> confidence_interval(double tau_hat, double sigma2_hat, int n,
                                              double level);

struct EstimateOptions {
    double pi = 1.0;
    double eta = 0.0;
    Variant variant = Variant::fully_adjusted;
    // nullopt selects the smallest valid adjustment set among the observed
    // covariates (ties broken lexicographically)
    std::optional<std::vector<std::string>> adjustment;
    bool prefer_closed_form = true;
    int mc_reps = 1000;
    std::uint64_t mc_seed = 1;
    double ci_level = 0.95;
    bool compute_d_max = true;
};

struct EstimateReport {
    double pi = 0.0, eta = 0.0;
    Variant variant = Variant::fully_adjusted;
    int n_units = 0;
    std::vector<std::string> columns;
    Eigen::VectorXd alpha_full_hat;
    Eigen::VectorXd alpha0_hat;
    Eigen::VectorXd alpha1_hat;
    double tau_hat = 0.0;
    double sigma2_hat = 0.0;
    double ci_level = 0.95;
    std::pair<double, double> ci{0.0, 0.0};
    std::vector<std::string> adjustment;
    bool adjustment_auto_selected = false;
    Weights weights;
    double condition_number = 0.0;
    int d_max = -1;                 // -1 when the network is unavailable
    int zero_affector_units = 0;    // units taking the fill value in some feature
    std::string y_noise_note;       // flags the uniform outcome-noise convention
};

// Full pipeline of the fully adjusted estimator: checks identifiability in
// the generic graph, selects or validates the adjustment set, fits, and
// assembles the report. Exposure is always the feature/treatment/interaction
// blocks; the outcome is the graph's outcome node.
EstimateReport adjust_and_estimate(const Dataset& ds, const Dag& generic,
                                   const EstimateOptions& options);

// Same fitting path for the comparison estimators (no graph involved).
EstimateReport estimate_variant(const Dataset& ds, const RegressorSpec& spec,
                                const EstimateOptions& options, const Weights& weights);

std::string report_to_json(const EstimateReport& report);

} // namespace netfx
