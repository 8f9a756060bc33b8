#pragma once

#include <string>
#include <variant>

#include "netfx/network.hpp"
#include "netfx/rng.hpp"

namespace netfx {

// Edge probability as a function of the unit count: a constant, c/N, or N^-a.
struct PExpr {
    enum class Kind { constant, c_over_n, n_pow };
    Kind kind = Kind::constant;
    double value = 0.0; // the constant, the numerator c, or the (positive) exponent a

    double eval(int n) const;
    std::string str() const;
    static PExpr parse(const std::string& text); // "0.2" | "10/N" | "N^-2/3" | "N^-0.64"
};

struct ErdosRenyiPaired {
    PExpr p;
};

struct FamilyPartition {
    int min_size = 1;
    int max_size = 6;
};

struct Lattice2d {};

using NetworkGenerator = std::variant<ErdosRenyiPaired, FamilyPartition, Lattice2d>;

// For each unordered pair, with probability p both directed edges are drawn,
// otherwise neither; the adjacency matrix is symmetric by construction.
InteractionNetwork gen_erdos_renyi(int n, double p, Rng& rng);

// Disjoint bidirectionally complete families; sizes are iid uniform on
// {min_size..max_size} with the last family truncated to land on n exactly.
InteractionNetwork gen_family(int n, int min_size, int max_size, Rng& rng);
InteractionNetwork gen_family(int n, Rng& rng); // sizes 1..6

// side x side grid, one directed edge per adjacent pair, oriented rightward
// and downward; deterministic.
InteractionNetwork gen_lattice2d(int side);

// Dispatch; for the lattice, n must be a perfect square.
InteractionNetwork generate_network(const NetworkGenerator& gen, int n, Rng& rng);

// "er:10/N" | "er:0.2" | "er:N^-2/3" | "family" | "family:1:6" | "lattice2d"
NetworkGenerator parse_generator(const std::string& text);
std::string describe(const NetworkGenerator& gen);

} // namespace netfx
