#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netfx/error.hpp"

namespace netfx {

// Directed interaction network over units 0..n-1. The file format and the
// paper's examples number units from 1; the API is 0-based throughout.
// Adjacency is kept as sorted neighbor lists plus a dense bit matrix for
// n <= 4096, both behind the same interface.
class InteractionNetwork {
public:
    explicit InteractionNetwork(int n_units,
                                std::vector<std::pair<int, int>> edges = {});

    int n_units() const { return n_; }
    std::size_t n_edges() const { return n_edges_; }
    bool has_edge(int i, int j) const;
    // in-neighbors: {j : j -> i}
    const std::vector<int>& parents(int i) const;
    // out-neighbors: {j : i -> j}
    const std::vector<int>& children(int i) const;
    std::vector<std::pair<int, int>> edges() const;

    // {j != i : some l has j -> l and l -> i}
    std::vector<int> second_order_set(int i) const;

    bool adjacency_symmetric() const;

private:
    void check_index(int i) const;

    int n_ = 0;
    std::size_t n_edges_ = 0;
    std::vector<std::vector<int>> in_;
    std::vector<std::vector<int>> out_;
    std::vector<std::uint64_t> dense_; // row-major bits, only for n <= 4096
    int dense_words_ = 0;
};

// TSV edge list, 1-based `i<TAB>j` rows, header line `# n_units=N`.
InteractionNetwork read_network_tsv(std::istream& in);
InteractionNetwork read_network_tsv_file(const std::string& path);
void write_network_tsv(const InteractionNetwork& net, std::ostream& out);

} // namespace netfx
