#pragma once

#include <cstdint>
#include <vector>

#include "netfx/features.hpp"
#include "netfx/generators.hpp"

namespace netfx {

struct SlopeResult {
    std::vector<int> sizes;
    std::vector<double> avg_max_degree; // per size, averaged over reps
    double slope = 0.0;                 // log avg d_max on log N
};

// Samples `reps` networks per size, builds the interference dependency graph
// for the feature spec, and fits log(avg max degree) on log N. Cells run in
// parallel with one derived stream per (size, rep).
SlopeResult degree_scaling_slope(const NetworkGenerator& generator, const FeatureSpec& spec,
                                 const std::vector<int>& sizes, int reps, std::uint64_t seed,
                                 int threads = 0);

} // namespace netfx
