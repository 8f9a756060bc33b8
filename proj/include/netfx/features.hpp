#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netfx/network.hpp"

namespace netfx {

// Built-in interference features. Each kind defines, for every unit i, the
// affector set A(i) of other units whose treatments enter the feature value.
struct FracTreatedParents {};

struct ThresholdTreatedParents {
    double threshold = 0.5; // indicator of treated-parent fraction >= threshold
};

struct FracTreatedParentsOfParents {};

// Affector sets are declared, not discovered: the dependency graph is built
// from them by pure set operations. `mean_under_policy` supplies the closed
// form E[X_i | do(W ~ Bern(theta))] when one exists.
struct CustomFeature {
    std::string name;
    std::vector<std::vector<int>> affectors; // per unit, sorted, never contains the unit
    std::function<double(int unit, const std::vector<std::uint8_t>& w)> eval;
    std::function<double(int unit, double theta)> mean_under_policy; // may be empty
};

using FeatureKind =
    std::variant<FracTreatedParents, ThresholdTreatedParents, FracTreatedParentsOfParents,
                 CustomFeature>;

class FeatureSpec {
public:
    explicit FeatureSpec(std::vector<FeatureKind> kinds, double fill_value = 0.0);

    int p() const { return static_cast<int>(kinds_.size()); }
    double fill_value() const { return fill_; }
    const std::vector<FeatureKind>& kinds() const { return kinds_; }
    bool has_closed_form() const;
    std::string describe() const;

    // "frac-parents", "frac-parents2", "threshold:<t>", comma separated
    static FeatureSpec parse(const std::string& text, double fill_value = 0.0);

private:
    std::vector<FeatureKind> kinds_;
    double fill_;
};

// A(i) for one feature kind on a given network (built-ins derive it from the
// network, custom features return their declaration).
std::vector<std::vector<int>> affector_sets(const FeatureKind& kind, const InteractionNetwork& net);

// union over the spec's features, per unit
std::vector<std::vector<int>> combined_affector_sets(const FeatureSpec& spec,
                                                     const InteractionNetwork& net);

// Precomputes the per-unit evaluation sets once so that many treatment
// vectors can be mapped to feature matrices cheaply (the simulation harness
// evaluates thousands of draws per network).
class FeatureComputer {
public:
    FeatureComputer(const InteractionNetwork& net, const FeatureSpec& spec);

    int n_units() const { return n_; }
    int p() const { return static_cast<int>(spec_.p()); }
    const FeatureSpec& spec() const { return spec_; }

    Eigen::MatrixXd compute(const std::vector<std::uint8_t>& w) const;

    // E[X_ik | do(W ~ Bern(theta))]; throws ConfigError when some feature has
    // no closed form (use Monte Carlo weights instead).
    Eigen::MatrixXd means_under_policy(double theta) const;

    // units whose affector set is empty for feature k (they take the fill value)
    int empty_set_count(int k) const;

private:
    int n_;
    FeatureSpec spec_;
    std::vector<std::vector<std::vector<int>>> sets_; // [feature][unit]
    const InteractionNetwork* net_;
};

Eigen::MatrixXd compute_features(const InteractionNetwork& net, const std::vector<std::uint8_t>& w,
                                 const FeatureSpec& spec);

// P(Bin(n, theta)/n >= threshold), the closed-form mean of the threshold feature
double binomial_tail_fraction(int n, double theta, double threshold);

} // namespace netfx
