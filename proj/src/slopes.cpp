#include "netfx/slopes.hpp"

#include <cmath>

#include "netfx/depgraph.hpp"
#include "netfx/error.hpp"
#include "netfx/parallel.hpp"
#include "netfx/stats.hpp"

namespace netfx {

SlopeResult degree_scaling_slope(const NetworkGenerator& generator, const FeatureSpec& spec,
                                 const std::vector<int>& sizes, int reps, std::uint64_t seed,
                                 int threads) {
    if (sizes.empty() || reps < 1) throw ConfigError("degree_scaling_slope: empty size grid");
    for (std::size_t s = 1; s < sizes.size(); ++s)
        if (sizes[s] <= sizes[s - 1]) throw ConfigError("sizes must be strictly ascending");

    std::vector<int> distinct(sizes);
    if (distinct.size() < 2)
        throw ConfigError("degree_scaling_slope: need at least two sizes for a slope");

    const std::size_t cells = sizes.size() * static_cast<std::size_t>(reps);
    std::vector<double> d_max(cells, 0.0);
    parallel_for(cells, threads, [&](std::size_t cell) {
        const std::size_t size_ix = cell / static_cast<std::size_t>(reps);
        const int rep = static_cast<int>(cell % static_cast<std::size_t>(reps));
        const int n = sizes[size_ix];
        Rng rng = Rng::stream(seed, {0xD3ull, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(rep)});
        const InteractionNetwork net = generate_network(generator, n, rng);
        d_max[cell] = static_cast<double>(dependency_graph(net, spec).max_degree());
    });

    SlopeResult out;
    out.sizes = sizes;
    out.avg_max_degree.resize(sizes.size(), 0.0);
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        double sum = 0.0;
        for (int r = 0; r < reps; ++r) sum += d_max[s * static_cast<std::size_t>(reps) + r];
        out.avg_max_degree[s] = sum / reps;
    }

    std::vector<double> log_n, log_d;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        if (out.avg_max_degree[s] <= 0.0)
            throw NumericalError("average maximal degree is zero at N=" + std::to_string(sizes[s]) +
                                 "; log-log fit undefined");
        log_n.push_back(std::log(static_cast<double>(sizes[s])));
        log_d.push_back(std::log(out.avg_max_degree[s]));
    }
    out.slope = ols_slope(log_n, log_d);
    return out;
}

} // namespace netfx
