#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "netfx/features.hpp"
#include "netfx/network.hpp"
#include "netfx/rng.hpp"

namespace netfx {

struct WeightProvenance {
    enum class Kind { closed_form, monte_carlo };
    Kind kind = Kind::closed_form;
    int reps = 0;
    std::uint64_t seed = 0;
    bool common_random_numbers = true;
};

// Policy weights converting coefficient estimates into the global effect:
// tau = omega0' alpha0 + omega1' (alpha0 + alpha1). Component 0 corresponds
// to the intercept, components 1..P to the features.
struct Weights {
    Eigen::VectorXd omega0;
    Eigen::VectorXd omega1;
    WeightProvenance provenance;

    int p() const { return static_cast<int>(omega0.size()) - 1; }
};

// omega0 = (1/N) sum_i [(1-pi)(1, m_i(pi)) - (1-eta)(1, m_i(eta))] and
// omega1 the same with pi/eta prefactors, where m_i(theta) is the per-unit
// closed-form feature mean under W ~ Bern(theta).
Weights closed_form_weights(const InteractionNetwork& net, const FeatureSpec& spec, double pi,
                            double eta);
Weights closed_form_weights(const FeatureComputer& fc, double pi, double eta);

// Replaces the per-unit means by Monte Carlo averages over treatment draws.
// With common random numbers the pi and eta draws share uniforms, so pi == eta
// yields exactly zero weights.
Weights mc_weights(const InteractionNetwork& net, const FeatureSpec& spec, double pi, double eta,
                   int reps, std::uint64_t seed, bool common_random_numbers = true);
Weights mc_weights(const FeatureComputer& fc, double pi, double eta, int reps, std::uint64_t seed,
                   bool common_random_numbers = true);

// Weights for designs without interference features (P = 0): omega0 = eta-pi,
// omega1 = pi-eta, both over the intercept slot alone.
Weights intercept_only_weights(double pi, double eta);

} // namespace netfx
