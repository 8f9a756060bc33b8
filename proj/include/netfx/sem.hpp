#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "netfx/features.hpp"
#include "netfx/network.hpp"
#include "netfx/rng.hpp"
#include "netfx/weights.hpp"

namespace netfx {

struct NoiseSpec {
    enum class Kind { gaussian, uniform, none };
    Kind kind = Kind::gaussian;
    double variance = 1.0;

    // A mean-zero uniform with variance v is supported on +-sqrt(3 v).
    double draw(Rng& rng) const;
    std::string str() const;
    static NoiseSpec parse(const std::string& text); // "gaussian:1" | "uniform:1" | "none"
};

// Structural model: recursive covariates with linear links, a logistic
// treatment, interference features, and the linear outcome
// Y = (1, X') alpha0 + (W, O') alpha1 + gamma' C + eps_Y with O = W * X.
struct SemConfig {
    Eigen::VectorXd alpha0; // length P+1
    Eigen::VectorXd alpha1; // length P+1
    Eigen::VectorXd gamma;  // length Dc

    Eigen::VectorXd c_intercepts;                   // length Dc
    std::vector<std::tuple<int, int, double>> c_links; // (dst, src, coef), src < dst, 0-based
    Eigen::VectorXd treat_coef;                     // length Dc, logistic coefficients
    double treat_intercept = 0.0;
    std::vector<NoiseSpec> c_noise; // length Dc
    NoiseSpec y_noise;

    int dc() const { return static_cast<int>(gamma.size()); }
    int p() const { return static_cast<int>(alpha0.size()) - 1; }
    void validate(int p_features) const;

    // The simulation-study model: C1 = -2 + e, C2 = 2 C1 + e, C3 = 0.5 + e,
    // W ~ Bern(logistic(C2 + 5 C3)), gamma = (1.5, 0, 0), unit-variance
    // Gaussian covariate noise and unit-variance uniform outcome noise.
    static SemConfig example_study(const Eigen::VectorXd& alpha0, const Eigen::VectorXd& alpha1);
    static SemConfig example_study(int p_features); // alpha filled per the study defaults
};

// Per-unit observations plus the network and feature spec that produced them
// (needed downstream for weights and diagnostics; absent when a dataset is
// loaded from a bare CSV).
struct Dataset {
    Eigen::MatrixXd C; // N x Dc
    std::vector<std::string> c_names;
    Eigen::VectorXd W; // binary
    Eigen::MatrixXd X; // N x P
    Eigen::MatrixXd O; // N x P, O = W * X rowwise
    Eigen::VectorXd Y;

    std::shared_ptr<const InteractionNetwork> network;
    std::optional<FeatureSpec> feature_spec;

    int n() const { return static_cast<int>(Y.size()); }
    int p() const { return static_cast<int>(X.cols()); }
    int dc() const { return static_cast<int>(C.cols()); }
    void validate() const;
    std::optional<int> covariate_index(const std::string& name) const;
};

Dataset simulate(const SemConfig& cfg, const InteractionNetwork& net, const FeatureSpec& spec,
                 Rng& rng);
// reuses precomputed feature sets; net/spec metadata still attached
Dataset simulate(const SemConfig& cfg, const std::shared_ptr<const InteractionNetwork>& net,
                 const FeatureComputer& fc, Rng& rng);

// tau = omega0' alpha0 + omega1' (alpha0 + alpha1)
double true_tau(const SemConfig& cfg, const Weights& weights);

struct McTau {
    double estimate = 0.0;
    double std_error = 0.0;
    int reps = 0;
};

// Brute-force oracle: simulates the SEM under W ~ Bern(pi) and Bern(eta)
// (shared covariate and noise draws within a replicate) and averages the
// outcome contrast, holding the network fixed.
McTau mc_tau_oracle(const SemConfig& cfg, const InteractionNetwork& net, const FeatureSpec& spec,
                    double pi, double eta, int reps, Rng& rng);

// CSV with header `unit,C1..Ck,W,X1..Xp,O1..Op,Y`, units 1-based.
void write_dataset_csv(const Dataset& ds, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);

} // namespace netfx
