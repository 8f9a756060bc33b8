#include "netfx/depgraph.hpp"

#include <bit>

#include "netfx/error.hpp"

namespace netfx {

DependencyGraph::DependencyGraph(int n_units) : n_(n_units), words_((n_units + 63) / 64) {
    if (n_ < 0) throw DataError("dependency graph size must be nonnegative");
    bits_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(words_), 0);
}

bool DependencyGraph::at(int i, int j) const {
    return (row(i)[j / 64] >> (j % 64)) & 1ull;
}

void DependencyGraph::set_bit(int i, int j) { row(i)[j / 64] |= (1ull << (j % 64)); }

void DependencyGraph::clear_bit(int i, int j) { row(i)[j / 64] &= ~(1ull << (j % 64)); }

int DependencyGraph::degree(int i) const {
    int deg = 0;
    const std::uint64_t* r = row(i);
    for (int w = 0; w < words_; ++w) deg += std::popcount(r[w]);
    return deg;
}

int DependencyGraph::max_degree() const {
    int best = 0;
    for (int i = 0; i < n_; ++i) best = std::max(best, degree(i));
    return best;
}

std::vector<std::pair<int, int>> DependencyGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (at(i, j)) out.emplace_back(i, j);
    return out;
}

bool DependencyGraph::symmetric_zero_diagonal() const {
    for (int i = 0; i < n_; ++i) {
        if (at(i, i)) return false;
        for (int j = i + 1; j < n_; ++j)
            if (at(i, j) != at(j, i)) return false;
    }
    return true;
}

DependencyGraph dependency_graph_from_affectors(const std::vector<std::vector<int>>& affectors) {
    const int n = static_cast<int>(affectors.size());
    DependencyGraph d(n);
    const int words = d.words();

    // affected_by[l] = bitset of units whose affector set contains l
    std::vector<std::uint64_t> affected_by(static_cast<std::size_t>(n) *
                                               static_cast<std::size_t>(words),
                                           0);
    for (int i = 0; i < n; ++i)
        for (int l : affectors[static_cast<std::size_t>(i)])
            affected_by[static_cast<std::size_t>(l) * words + static_cast<std::size_t>(i / 64)] |=
                (1ull << (i % 64));

    for (int i = 0; i < n; ++i) {
        std::uint64_t* r = d.row(i);
        for (int l : affectors[static_cast<std::size_t>(i)]) {
            // (b) l is an affector of i, and (c) every unit sharing the
            // affector l; l itself differs from both ends by construction
            r[l / 64] |= (1ull << (l % 64));
            const std::uint64_t* share = affected_by.data() + static_cast<std::size_t>(l) * words;
            for (int w = 0; w < words; ++w) r[w] |= share[w];
        }
        // (a) units that list i as an affector
        const std::uint64_t* lists_i = affected_by.data() + static_cast<std::size_t>(i) * words;
        for (int w = 0; w < words; ++w) r[w] |= lists_i[w];
        d.clear_bit(i, i);
    }
    return d;
}

DependencyGraph dependency_graph(const InteractionNetwork& net, const FeatureSpec& spec) {
    return dependency_graph_from_affectors(combined_affector_sets(spec, net));
}

int max_degree(const DependencyGraph& d) { return d.max_degree(); }

} // namespace netfx
