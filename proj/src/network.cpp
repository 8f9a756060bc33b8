#include "netfx/network.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace netfx {

namespace {
constexpr int kDenseLimit = 4096;
}

InteractionNetwork::InteractionNetwork(int n_units, std::vector<std::pair<int, int>> edges)
    : n_(n_units) {
    if (n_ < 0) throw DataError("network size must be nonnegative");
    in_.resize(static_cast<std::size_t>(n_));
    out_.resize(static_cast<std::size_t>(n_));
    if (n_ <= kDenseLimit) {
        dense_words_ = (n_ + 63) / 64;
        dense_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(dense_words_), 0);
    }
    for (const auto& [i, j] : edges) {
        check_index(i);
        check_index(j);
        if (i == j) throw DataError("self-loop on unit " + std::to_string(i + 1));
        out_[static_cast<std::size_t>(i)].push_back(j);
        in_[static_cast<std::size_t>(j)].push_back(i);
    }
    for (int v = 0; v < n_; ++v) {
        auto& o = out_[static_cast<std::size_t>(v)];
        std::sort(o.begin(), o.end());
        if (std::adjacent_find(o.begin(), o.end()) != o.end())
            throw DataError("duplicate edge out of unit " + std::to_string(v + 1));
        std::sort(in_[static_cast<std::size_t>(v)].begin(), in_[static_cast<std::size_t>(v)].end());
        n_edges_ += o.size();
        if (!dense_.empty())
            for (int j : o)
                dense_[static_cast<std::size_t>(v) * dense_words_ + static_cast<std::size_t>(j / 64)] |=
                    (1ull << (j % 64));
    }
}

void InteractionNetwork::check_index(int i) const {
    if (i < 0 || i >= n_)
        throw DataError("unit index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(n_) + ")");
}

bool InteractionNetwork::has_edge(int i, int j) const {
    check_index(i);
    check_index(j);
    if (!dense_.empty())
        return (dense_[static_cast<std::size_t>(i) * dense_words_ + static_cast<std::size_t>(j / 64)] >>
                (j % 64)) & 1ull;
    const auto& o = out_[static_cast<std::size_t>(i)];
    return std::binary_search(o.begin(), o.end(), j);
}

const std::vector<int>& InteractionNetwork::parents(int i) const {
    check_index(i);
    return in_[static_cast<std::size_t>(i)];
}

const std::vector<int>& InteractionNetwork::children(int i) const {
    check_index(i);
    return out_[static_cast<std::size_t>(i)];
}

std::vector<std::pair<int, int>> InteractionNetwork::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_edges_);
    for (int i = 0; i < n_; ++i)
        for (int j : out_[static_cast<std::size_t>(i)]) out.emplace_back(i, j);
    return out;
}

std::vector<int> InteractionNetwork::second_order_set(int i) const {
    check_index(i);
    std::vector<int> acc;
    for (int l : in_[static_cast<std::size_t>(i)])
        for (int j : in_[static_cast<std::size_t>(l)])
            if (j != i) acc.push_back(j);
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    return acc;
}

bool InteractionNetwork::adjacency_symmetric() const {
    for (int i = 0; i < n_; ++i)
        for (int j : out_[static_cast<std::size_t>(i)])
            if (!has_edge(j, i)) return false;
    return true;
}

InteractionNetwork read_network_tsv(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("n_units=");
            if (pos != std::string::npos) n = std::stoi(line.substr(pos + 8));
            continue;
        }
        std::istringstream ss(line);
        int i = 0, j = 0;
        if (!(ss >> i >> j))
            throw DataError("network line " + std::to_string(lineno) + ": expected 'i<TAB>j'");
        edges.emplace_back(i - 1, j - 1); // file is 1-based
    }
    if (n < 0) throw DataError("network file missing '# n_units=N' header");
    return InteractionNetwork(n, std::move(edges));
}

InteractionNetwork read_network_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file '" + path + "'");
    return read_network_tsv(in);
}

void write_network_tsv(const InteractionNetwork& net, std::ostream& out) {
    out << "# n_units=" << net.n_units() << "\n";
    for (const auto& [i, j] : net.edges()) out << (i + 1) << "\t" << (j + 1) << "\n";
}

} // namespace netfx
