#include "netfx/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "netfx/error.hpp"

namespace netfx {

FeatureSpec::FeatureSpec(std::vector<FeatureKind> kinds, double fill_value)
    : kinds_(std::move(kinds)), fill_(fill_value) {
    if (kinds_.empty()) throw ConfigError("feature spec needs at least one feature");
    for (const auto& kind : kinds_) {
        if (const auto* t = std::get_if<ThresholdTreatedParents>(&kind)) {
            if (!(t->threshold > 0.0 && t->threshold <= 1.0))
                throw ConfigError("threshold feature needs a fraction in (0, 1]");
        } else if (const auto* c = std::get_if<CustomFeature>(&kind)) {
            if (!c->eval) throw ConfigError("custom feature '" + c->name + "' has no evaluator");
            for (std::size_t i = 0; i < c->affectors.size(); ++i)
                for (int j : c->affectors[i])
                    if (j == static_cast<int>(i))
                        throw ConfigError("custom feature '" + c->name +
                                          "' declares the unit as its own affector");
        }
    }
}

bool FeatureSpec::has_closed_form() const {
    for (const auto& kind : kinds_)
        if (const auto* c = std::get_if<CustomFeature>(&kind))
            if (!c->mean_under_policy) return false;
    return true;
}

std::string FeatureSpec::describe() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& kind : kinds_) {
        if (!first) out << ",";
        first = false;
        if (std::holds_alternative<FracTreatedParents>(kind))
            out << "frac-parents";
        else if (std::holds_alternative<FracTreatedParentsOfParents>(kind))
            out << "frac-parents2";
        else if (const auto* t = std::get_if<ThresholdTreatedParents>(&kind))
            out << "threshold:" << t->threshold;
        else
            out << "custom:" << std::get<CustomFeature>(kind).name;
    }
    return out.str();
}

FeatureSpec FeatureSpec::parse(const std::string& text, double fill_value) {
    std::vector<FeatureKind> kinds;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "frac-parents") {
            kinds.emplace_back(FracTreatedParents{});
        } else if (item == "frac-parents2") {
            kinds.emplace_back(FracTreatedParentsOfParents{});
        } else if (item.rfind("threshold:", 0) == 0) {
            kinds.emplace_back(ThresholdTreatedParents{std::stod(item.substr(10))});
        } else {
            throw ConfigError("unknown feature kind '" + item + "'");
        }
    }
    return FeatureSpec(std::move(kinds), fill_value);
}

std::vector<std::vector<int>> affector_sets(const FeatureKind& kind, const InteractionNetwork& net) {
    const int n = net.n_units();
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
    if (std::holds_alternative<FracTreatedParents>(kind) ||
        std::holds_alternative<ThresholdTreatedParents>(kind)) {
        for (int i = 0; i < n; ++i) sets[static_cast<std::size_t>(i)] = net.parents(i);
    } else if (std::holds_alternative<FracTreatedParentsOfParents>(kind)) {
        for (int i = 0; i < n; ++i) sets[static_cast<std::size_t>(i)] = net.second_order_set(i);
    } else {
        const auto& custom = std::get<CustomFeature>(kind);
        if (static_cast<int>(custom.affectors.size()) != n)
            throw ConfigError("custom feature '" + custom.name + "' declares affector sets for " +
                              std::to_string(custom.affectors.size()) + " units, network has " +
                              std::to_string(n));
        sets = custom.affectors;
    }
    return sets;
}

std::vector<std::vector<int>> combined_affector_sets(const FeatureSpec& spec,
                                                     const InteractionNetwork& net) {
    const int n = net.n_units();
    std::vector<std::vector<int>> combined(static_cast<std::size_t>(n));
    for (const auto& kind : spec.kinds()) {
        const auto sets = affector_sets(kind, net);
        for (int i = 0; i < n; ++i) {
            auto& dst = combined[static_cast<std::size_t>(i)];
            dst.insert(dst.end(), sets[static_cast<std::size_t>(i)].begin(),
                       sets[static_cast<std::size_t>(i)].end());
        }
    }
    for (auto& s : combined) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return combined;
}

FeatureComputer::FeatureComputer(const InteractionNetwork& net, const FeatureSpec& spec)
    : n_(net.n_units()), spec_(spec), net_(&net) {
    sets_.reserve(spec_.kinds().size());
    for (const auto& kind : spec_.kinds()) sets_.push_back(affector_sets(kind, net));
}

Eigen::MatrixXd FeatureComputer::compute(const std::vector<std::uint8_t>& w) const {
    if (static_cast<int>(w.size()) != n_)
        throw DataError("treatment vector has length " + std::to_string(w.size()) +
                        ", network has " + std::to_string(n_) + " units");
    Eigen::MatrixXd x(n_, spec_.p());
    for (int k = 0; k < spec_.p(); ++k) {
        const auto& kind = spec_.kinds()[static_cast<std::size_t>(k)];
        const auto& sets = sets_[static_cast<std::size_t>(k)];
        if (const auto* custom = std::get_if<CustomFeature>(&kind)) {
            for (int i = 0; i < n_; ++i) x(i, k) = custom->eval(i, w);
            continue;
        }
        const double thr = std::holds_alternative<ThresholdTreatedParents>(kind)
                               ? std::get<ThresholdTreatedParents>(kind).threshold
                               : -1.0;
        for (int i = 0; i < n_; ++i) {
            const auto& set = sets[static_cast<std::size_t>(i)];
            if (set.empty()) {
                x(i, k) = spec_.fill_value();
                continue;
            }
            int treated = 0;
            for (int j : set) treated += w[static_cast<std::size_t>(j)];
            const double frac = static_cast<double>(treated) / static_cast<double>(set.size());
            x(i, k) = thr < 0.0 ? frac : (frac >= thr ? 1.0 : 0.0);
        }
    }
    return x;
}

Eigen::MatrixXd FeatureComputer::means_under_policy(double theta) const {
    Eigen::MatrixXd m(n_, spec_.p());
    for (int k = 0; k < spec_.p(); ++k) {
        const auto& kind = spec_.kinds()[static_cast<std::size_t>(k)];
        const auto& sets = sets_[static_cast<std::size_t>(k)];
        for (int i = 0; i < n_; ++i) {
            const auto& set = sets[static_cast<std::size_t>(i)];
            if (const auto* custom = std::get_if<CustomFeature>(&kind)) {
                if (!custom->mean_under_policy)
                    throw ConfigError("feature 'custom:" + custom->name +
                                      "' has no closed-form policy mean; use Monte Carlo weights");
                m(i, k) = custom->mean_under_policy(i, theta);
            } else if (set.empty()) {
                m(i, k) = spec_.fill_value();
            } else if (std::holds_alternative<ThresholdTreatedParents>(kind)) {
                m(i, k) = binomial_tail_fraction(static_cast<int>(set.size()), theta,
                                                 std::get<ThresholdTreatedParents>(kind).threshold);
            } else {
                m(i, k) = theta; // fraction-type features
            }
        }
    }
    return m;
}

int FeatureComputer::empty_set_count(int k) const {
    int count = 0;
    for (const auto& set : sets_[static_cast<std::size_t>(k)])
        if (set.empty()) ++count;
    return count;
}

Eigen::MatrixXd compute_features(const InteractionNetwork& net, const std::vector<std::uint8_t>& w,
                                 const FeatureSpec& spec) {
    return FeatureComputer(net, spec).compute(w);
}

double binomial_tail_fraction(int n, double theta, double threshold) {
    if (n <= 0) throw ConfigError("binomial_tail_fraction: empty parent set");
    const int k_min = static_cast<int>(std::ceil(threshold * n - 1e-12));
    if (k_min <= 0) return 1.0;
    if (k_min > n) return 0.0;
    if (theta <= 0.0) return 0.0;
    if (theta >= 1.0) return 1.0;
    double tail = 0.0;
    for (int k = k_min; k <= n; ++k) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) + k * std::log(theta) +
                                (n - k) * std::log1p(-theta);
        tail += std::exp(log_term);
    }
    return std::min(1.0, tail);
}

} // namespace netfx
