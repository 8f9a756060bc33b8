#include "netfx/generators.hpp"

#include <cmath>
#include <sstream>

#include "netfx/error.hpp"

namespace netfx {

double PExpr::eval(int n) const {
    double p = 0.0;
    switch (kind) {
        case Kind::constant: p = value; break;
        case Kind::c_over_n: p = value / static_cast<double>(n); break;
        case Kind::n_pow: p = std::pow(static_cast<double>(n), -value); break;
    }
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("edge probability " + std::to_string(p) + " outside [0,1] at N=" +
                          std::to_string(n));
    return p;
}

std::string PExpr::str() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::constant: out << value; break;
        case Kind::c_over_n: out << value << "/N"; break;
        case Kind::n_pow: out << "N^-" << value; break;
    }
    return out.str();
}

PExpr PExpr::parse(const std::string& text) {
    PExpr e;
    if (text.rfind("N^-", 0) == 0) {
        e.kind = Kind::n_pow;
        const std::string expo = text.substr(3);
        const auto slash = expo.find('/');
        if (slash != std::string::npos) {
            e.value = std::stod(expo.substr(0, slash)) / std::stod(expo.substr(slash + 1));
        } else {
            e.value = std::stod(expo);
        }
        if (e.value <= 0.0) throw ConfigError("exponent in '" + text + "' must be positive");
        return e;
    }
    const auto slash = text.find("/N");
    if (slash != std::string::npos) {
        e.kind = Kind::c_over_n;
        e.value = std::stod(text.substr(0, slash));
        if (e.value < 0.0) throw ConfigError("numerator in '" + text + "' must be nonnegative");
        return e;
    }
    e.kind = Kind::constant;
    e.value = std::stod(text);
    if (e.value < 0.0 || e.value > 1.0)
        throw ConfigError("constant probability '" + text + "' outside [0,1]");
    return e;
}

InteractionNetwork gen_erdos_renyi(int n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("erdos-renyi p outside [0,1]");
    std::vector<std::pair<int, int>> edges;
    if (n > 1 && p > 0.0) {
        if (p >= 1.0) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    edges.emplace_back(i, j);
                    edges.emplace_back(j, i);
                }
        } else {
            // geometric skipping over the n(n-1)/2 unordered pairs
            const double log_q = std::log1p(-p);
            std::uint64_t k = 0;
            const std::uint64_t total =
                static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
            for (;;) {
                const double u = 1.0 - rng.uniform01(); // (0, 1]
                k += static_cast<std::uint64_t>(std::floor(std::log(u) / log_q));
                if (k >= total) break;
                // pair index -> (i, j), walking rows of decreasing length
                std::uint64_t idx = k;
                int i = 0;
                std::uint64_t row = static_cast<std::uint64_t>(n - 1);
                while (idx >= row) {
                    idx -= row;
                    ++i;
                    --row;
                }
                const int j = i + 1 + static_cast<int>(idx);
                edges.emplace_back(i, j);
                edges.emplace_back(j, i);
                ++k;
            }
        }
    }
    return InteractionNetwork(n, std::move(edges));
}

InteractionNetwork gen_family(int n, int min_size, int max_size, Rng& rng) {
    if (n < 1) throw ConfigError("family network needs at least one unit");
    if (min_size < 1 || min_size > max_size) throw ConfigError("invalid family size range");
    std::vector<std::pair<int, int>> edges;
    int start = 0;
    while (start < n) {
        int size = static_cast<int>(rng.uniform_int(min_size, max_size));
        size = std::min(size, n - start); // last family truncated to fill n exactly
        for (int a = start; a < start + size; ++a)
            for (int b = a + 1; b < start + size; ++b) {
                edges.emplace_back(a, b);
                edges.emplace_back(b, a);
            }
        start += size;
    }
    return InteractionNetwork(n, std::move(edges));
}

InteractionNetwork gen_family(int n, Rng& rng) { return gen_family(n, 1, 6, rng); }

InteractionNetwork gen_lattice2d(int side) {
    if (side < 1) throw ConfigError("lattice side must be >= 1");
    const int n = side * side;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(2 * side * (side - 1)));
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int u = r * side + c;
            if (c + 1 < side) edges.emplace_back(u, u + 1);    // rightward
            if (r + 1 < side) edges.emplace_back(u, u + side); // downward
        }
    return InteractionNetwork(n, std::move(edges));
}

InteractionNetwork generate_network(const NetworkGenerator& gen, int n, Rng& rng) {
    if (const auto* er = std::get_if<ErdosRenyiPaired>(&gen))
        return gen_erdos_renyi(n, er->p.eval(n), rng);
    if (const auto* fam = std::get_if<FamilyPartition>(&gen))
        return gen_family(n, fam->min_size, fam->max_size, rng);
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n)
        throw ConfigError("lattice2d needs a perfect-square unit count, got " + std::to_string(n));
    return gen_lattice2d(side);
}

NetworkGenerator parse_generator(const std::string& text) {
    if (text.rfind("er:", 0) == 0) return ErdosRenyiPaired{PExpr::parse(text.substr(3))};
    if (text == "family") return FamilyPartition{};
    if (text.rfind("family:", 0) == 0) {
        const std::string rest = text.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw ConfigError("expected family:<min>:<max>, got '" + text + "'");
        return FamilyPartition{std::stoi(rest.substr(0, colon)), std::stoi(rest.substr(colon + 1))};
    }
    if (text == "lattice2d") return Lattice2d{};
    throw ConfigError("unknown network generator '" + text + "'");
}

std::string describe(const NetworkGenerator& gen) {
    if (const auto* er = std::get_if<ErdosRenyiPaired>(&gen)) return "er:" + er->p.str();
    if (const auto* fam = std::get_if<FamilyPartition>(&gen))
        return "family:" + std::to_string(fam->min_size) + ":" + std::to_string(fam->max_size);
    return "lattice2d";
}

} // namespace netfx
