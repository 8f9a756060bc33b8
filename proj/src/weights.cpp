#include "netfx/weights.hpp"

#include "netfx/error.hpp"

namespace netfx {

namespace {

void check_policy(double theta, const char* name) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0,1]");
}

// Assembles (omega0, omega1) from the averaged (1, X) expectations under the
// two policies.
Weights from_policy_means(const Eigen::VectorXd& mean_pi, const Eigen::VectorXd& mean_eta,
                          double pi, double eta) {
    Weights w;
    w.omega0 = (1.0 - pi) * mean_pi - (1.0 - eta) * mean_eta;
    w.omega1 = pi * mean_pi - eta * mean_eta;
    return w;
}

} // namespace

Weights closed_form_weights(const FeatureComputer& fc, double pi, double eta) {
    check_policy(pi, "pi");
    check_policy(eta, "eta");
    const int p = fc.p();
    Eigen::VectorXd mean_pi(p + 1), mean_eta(p + 1);
    mean_pi(0) = mean_eta(0) = 1.0;
    mean_pi.tail(p) = fc.means_under_policy(pi).colwise().mean().transpose();
    mean_eta.tail(p) = fc.means_under_policy(eta).colwise().mean().transpose();
    Weights w = from_policy_means(mean_pi, mean_eta, pi, eta);
    w.provenance = {WeightProvenance::Kind::closed_form, 0, 0, false};
    return w;
}

Weights closed_form_weights(const InteractionNetwork& net, const FeatureSpec& spec, double pi,
                            double eta) {
    return closed_form_weights(FeatureComputer(net, spec), pi, eta);
}

Weights mc_weights(const FeatureComputer& fc, double pi, double eta, int reps, std::uint64_t seed,
                   bool common_random_numbers) {
    check_policy(pi, "pi");
    check_policy(eta, "eta");
    if (reps < 1) throw ConfigError("mc_weights needs reps >= 1");
    const int n = fc.n_units();
    const int p = fc.p();
    Eigen::VectorXd mean_pi = Eigen::VectorXd::Zero(p + 1);
    Eigen::VectorXd mean_eta = Eigen::VectorXd::Zero(p + 1);

    Rng rng = Rng::stream(seed, {0x57ull});
    std::vector<std::uint8_t> w_pi(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> w_eta(static_cast<std::size_t>(n));
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform01();
            w_pi[static_cast<std::size_t>(i)] = u < pi ? 1 : 0;
            w_eta[static_cast<std::size_t>(i)] =
                (common_random_numbers ? u : rng.uniform01()) < eta ? 1 : 0;
        }
        mean_pi.tail(p) += fc.compute(w_pi).colwise().mean().transpose();
        mean_eta.tail(p) += fc.compute(w_eta).colwise().mean().transpose();
    }
    mean_pi.tail(p) /= static_cast<double>(reps);
    mean_eta.tail(p) /= static_cast<double>(reps);
    mean_pi(0) = mean_eta(0) = 1.0;

    Weights w = from_policy_means(mean_pi, mean_eta, pi, eta);
    w.provenance = {WeightProvenance::Kind::monte_carlo, reps, seed, common_random_numbers};
    return w;
}

Weights mc_weights(const InteractionNetwork& net, const FeatureSpec& spec, double pi, double eta,
                   int reps, std::uint64_t seed, bool common_random_numbers) {
    return mc_weights(FeatureComputer(net, spec), pi, eta, reps, seed, common_random_numbers);
}

Weights intercept_only_weights(double pi, double eta) {
    check_policy(pi, "pi");
    check_policy(eta, "eta");
    Weights w;
    w.omega0 = Eigen::VectorXd::Constant(1, eta - pi);
    w.omega1 = Eigen::VectorXd::Constant(1, pi - eta);
    w.provenance = {WeightProvenance::Kind::closed_form, 0, 0, false};
    return w;
}

} // namespace netfx
