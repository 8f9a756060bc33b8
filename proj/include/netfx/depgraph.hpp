#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netfx/features.hpp"
#include "netfx/network.hpp"

namespace netfx {

// Undirected interference dependency graph: absence of an edge i-j certifies
// independence of units i and j. Stored as a packed symmetric bit matrix with
// zero diagonal.
class DependencyGraph {
public:
    explicit DependencyGraph(int n_units);

    int n_units() const { return n_; }
    bool at(int i, int j) const;
    int degree(int i) const; // row popcount
    int max_degree() const;
    std::vector<std::pair<int, int>> edges() const; // i < j
    bool symmetric_zero_diagonal() const;

    // building blocks used by the constructor function
    std::uint64_t* row(int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; }
    const std::uint64_t* row(int i) const {
        return bits_.data() + static_cast<std::size_t>(i) * words_;
    }
    int words() const { return words_; }
    void clear_bit(int i, int j);
    void set_bit(int i, int j);

private:
    int n_;
    int words_;
    std::vector<std::uint64_t> bits_;
};

// Definition: D_ij = 1 iff i is an affector of j, j is an affector of i, or
// the affector sets of i and j share a third unit. Symmetry and the zero
// diagonal hold by construction.
DependencyGraph dependency_graph_from_affectors(const std::vector<std::vector<int>>& affectors);

DependencyGraph dependency_graph(const InteractionNetwork& net, const FeatureSpec& spec);

int max_degree(const DependencyGraph& d);

} // namespace netfx
