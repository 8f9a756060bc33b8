#include "netfx/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "netfx/csv.hpp"

namespace netfx {

PanelSchema PanelSchema::swiss() {
    PanelSchema s;
    s.unit_col = "unit";
    s.time_col = "week";
    s.treatment_col = "W";
    s.response = "Y";
    s.derived = {{"Y", "G", +2}, {"J", "Y", -2}};
    s.covariates = {"D1", "D2", "D3", "H", "M1", "M2", "M3", "P1", "P2", "P3", "J"};
    return s;
}

namespace {

struct RawPanel {
    std::vector<std::string> unit_labels;            // in first-appearance order
    std::map<std::string, int> unit_index;
    // column -> (unit, period) -> value
    std::map<std::string, std::map<std::pair<int, int>, double>> columns;
    std::set<std::pair<int, int>> keys;
};

RawPanel read_raw_panel(std::istream& in, const PanelSchema& schema) {
    const CsvTable table = read_csv(in);
    const int unit_col = table.require_column(schema.unit_col);
    const int time_col = table.require_column(schema.time_col);

    std::set<std::string> derived_names;
    for (const auto& d : schema.derived) derived_names.insert(d.name);

    std::vector<std::pair<std::string, int>> value_cols;
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        const std::string& name = table.columns[k];
        if (name == schema.unit_col || name == schema.time_col) continue;
        if (derived_names.count(name))
            throw DataError("column '" + name + "' clashes with a derived column name");
        value_cols.emplace_back(name, static_cast<int>(k));
    }

    RawPanel raw;
    for (const auto& row : table.rows) {
        const std::string& unit = row[static_cast<std::size_t>(unit_col)];
        auto [it, inserted] = raw.unit_index.emplace(unit, static_cast<int>(raw.unit_labels.size()));
        if (inserted) raw.unit_labels.push_back(unit);
        const int u = it->second;
        const int t = static_cast<int>(csv_double(row, time_col));
        if (!raw.keys.emplace(u, t).second)
            throw DataError("duplicate (unit, period) pair (" + unit + ", " + std::to_string(t) +
                            ")");
        for (const auto& [name, col] : value_cols)
            raw.columns[name][{u, t}] = csv_double(row, col);
    }
    return raw;
}

} // namespace

PanelDataset ingest_panel(std::istream& data_csv, std::istream& adjacency_tsv,
                          const PanelSchema& schema) {
    RawPanel raw = read_raw_panel(data_csv, schema);
    const int n_units = static_cast<int>(raw.unit_labels.size());
    if (n_units == 0) throw DataError("panel has no rows");

    // unit-level adjacency, labels resolved against the data
    std::vector<std::vector<int>> neighbors_in(static_cast<std::size_t>(n_units));
    {
        std::string line;
        int lineno = 0;
        std::set<std::pair<int, int>> seen;
        while (std::getline(adjacency_tsv, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string a, b;
            if (!(ss >> a >> b))
                throw DataError("adjacency line " + std::to_string(lineno) +
                                ": expected two unit labels");
            const auto ia = raw.unit_index.find(a);
            const auto ib = raw.unit_index.find(b);
            if (ia == raw.unit_index.end())
                throw DataError("adjacency references unknown unit '" + a + "'");
            if (ib == raw.unit_index.end())
                throw DataError("adjacency references unknown unit '" + b + "'");
            if (ia->second == ib->second)
                throw DataError("adjacency self-loop on unit '" + a + "'");
            if (seen.emplace(ia->second, ib->second).second)
                neighbors_in[static_cast<std::size_t>(ib->second)].push_back(ia->second);
        }
    }

    // derived columns, in order; later entries may reference earlier ones
    for (const auto& d : schema.derived) {
        const auto src = raw.columns.find(d.source);
        if (src == raw.columns.end())
            throw DataError("derived column '" + d.name + "' references missing column '" +
                            d.source + "'");
        std::map<std::pair<int, int>, double> out;
        for (const auto& key : raw.keys) {
            const auto shifted = src->second.find({key.first, key.second + d.shift});
            if (shifted != src->second.end()) out[key] = shifted->second;
        }
        raw.columns[d.name] = std::move(out);
    }

    const auto need_column = [&](const std::string& name) -> const auto& {
        const auto it = raw.columns.find(name);
        if (it == raw.columns.end()) throw DataError("missing column '" + name + "'");
        return it->second;
    };
    const auto& treatment = need_column(schema.treatment_col);
    const auto& response = need_column(schema.response);
    for (const auto& name : schema.covariates) need_column(name);

    // usable rows: every regression column defined
    std::vector<std::pair<int, int>> usable;
    for (const auto& key : raw.keys) {
        bool ok = treatment.count(key) && response.count(key);
        for (const auto& name : schema.covariates)
            if (!ok || !raw.columns.at(name).count(key)) ok = false;
        if (ok) usable.push_back(key);
    }
    std::sort(usable.begin(), usable.end());
    const int n_rows = static_cast<int>(usable.size());
    if (n_rows == 0) throw DataError("no usable rows after deriving the schema columns");

    std::map<std::pair<int, int>, int> row_of;
    for (int r = 0; r < n_rows; ++r) row_of[usable[static_cast<std::size_t>(r)]] = r;

    // expanded network: same-period neighbor edges among usable rows
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < n_rows; ++r) {
        const auto [u, t] = usable[static_cast<std::size_t>(r)];
        for (int j : neighbors_in[static_cast<std::size_t>(u)]) {
            const auto src = row_of.find({j, t});
            if (src != row_of.end()) edges.emplace_back(src->second, r);
        }
    }
    auto net = std::make_shared<InteractionNetwork>(n_rows, std::move(edges));

    PanelDataset pd;
    pd.n_input_rows = static_cast<int>(raw.keys.size());
    pd.n_dropped = pd.n_input_rows - n_rows;
    for (const auto& [u, t] : usable)
        pd.row_keys.emplace_back(raw.unit_labels[static_cast<std::size_t>(u)], t);

    Dataset& ds = pd.data;
    ds.W.resize(n_rows);
    ds.Y.resize(n_rows);
    ds.C.resize(n_rows, static_cast<int>(schema.covariates.size()));
    ds.c_names = schema.covariates;
    std::vector<std::uint8_t> w(static_cast<std::size_t>(n_rows));
    for (int r = 0; r < n_rows; ++r) {
        const auto& key = usable[static_cast<std::size_t>(r)];
        const double wv = treatment.at(key);
        if (wv != 0.0 && wv != 1.0)
            throw DataError("treatment must be binary; unit " + pd.row_keys[r].first +
                            " period " + std::to_string(key.second) + " has W = " +
                            std::to_string(wv));
        ds.W(r) = wv;
        w[static_cast<std::size_t>(r)] = wv > 0.5 ? 1 : 0;
        ds.Y(r) = response.at(key);
        for (std::size_t k = 0; k < schema.covariates.size(); ++k)
            ds.C(r, static_cast<int>(k)) = raw.columns.at(schema.covariates[k]).at(key);
    }

    const FeatureSpec spec = FeatureSpec::parse("frac-parents");
    ds.X = compute_features(*net, w, spec);
    ds.O = ds.X.array().colwise() * ds.W.array();
    ds.network = net;
    ds.feature_spec = spec;
    ds.validate();
    return pd;
}

PanelDataset ingest_panel_files(const std::string& data_path, const std::string& adjacency_path,
                                const PanelSchema& schema) {
    std::ifstream data(data_path);
    if (!data) throw ConfigError("cannot open panel data file '" + data_path + "'");
    std::ifstream adj(adjacency_path);
    if (!adj) throw ConfigError("cannot open adjacency file '" + adjacency_path + "'");
    return ingest_panel(data, adj, schema);
}

namespace {

// graph covariate node -> data columns: exact name or <node><digits>
std::vector<std::string> expand_block(const std::string& node,
                                      const std::vector<std::string>& columns) {
    std::vector<std::string> out;
    for (const auto& col : columns) {
        if (col == node) {
            out.push_back(col);
            continue;
        }
        if (col.size() > node.size() && col.rfind(node, 0) == 0) {
            const std::string rest = col.substr(node.size());
            if (std::all_of(rest.begin(), rest.end(),
                            [](unsigned char c) { return std::isdigit(c); }))
                out.push_back(col);
        }
    }
    return out;
}

} // namespace

std::vector<std::pair<Variant, EstimateReport>> run_observational(
    const PanelDataset& pd, const Dag& generic, const std::vector<Variant>& variants, double pi,
    double eta, const EstimateOptions& base_options) {
    const Dataset& ds = pd.data;

    const auto outcome_nodes = generic.nodes_with_role(NodeRole::outcome);
    const auto treatment_nodes = generic.nodes_with_role(NodeRole::treatment);
    const auto feature_nodes = generic.nodes_with_role(NodeRole::feature_block);
    const auto interaction_nodes = generic.nodes_with_role(NodeRole::interaction_block);
    if (outcome_nodes.size() != 1 || treatment_nodes.size() != 1 || feature_nodes.size() != 1 ||
        interaction_nodes.size() != 1)
        throw GraphError("panel graph must have one treatment, outcome, feature-block and "
                         "interaction-block node");
    NodeSet exposure{feature_nodes.front(), treatment_nodes.front(), interaction_nodes.front()};
    const std::string outcome = outcome_nodes.front();

    // observed candidate nodes and their column expansions
    NodeSet candidates;
    std::map<std::string, std::vector<std::string>> expansion;
    for (const auto& node : generic.nodes_with_role(NodeRole::covariate)) {
        auto cols = expand_block(node, ds.c_names);
        if (!cols.empty()) {
            candidates.insert(node);
            expansion[node] = std::move(cols);
        }
    }

    std::vector<std::string> z_nodes;
    if (base_options.adjustment) {
        z_nodes = *base_options.adjustment;
        NodeSet z(z_nodes.begin(), z_nodes.end());
        for (const auto& node : z_nodes)
            if (!candidates.count(node))
                throw IdentifiabilityError("adjustment node '" + node +
                                           "' is not an observed covariate block");
        if (!is_valid_adjustment(generic, exposure, outcome, z))
            throw IdentifiabilityError("requested adjustment set is not valid in the panel graph");
    } else {
        const auto sets = enumerate_valid_adjustment_sets(generic, exposure, outcome, candidates);
        if (sets.empty())
            throw IdentifiabilityError("no valid adjustment set among the observed covariate "
                                       "blocks of the panel graph");
        z_nodes.assign(sets.front().begin(), sets.front().end());
    }

    std::vector<std::string> z_columns;
    for (const auto& node : z_nodes)
        for (const auto& col : expansion.at(node)) z_columns.push_back(col);

    const FeatureComputer fc(*ds.network, *ds.feature_spec);
    const Weights feature_weights = closed_form_weights(fc, pi, eta);
    const Weights scalar_weights = intercept_only_weights(pi, eta);

    std::vector<std::pair<Variant, EstimateReport>> out;
    for (Variant variant : variants) {
        EstimateOptions options = base_options;
        options.pi = pi;
        options.eta = eta;
        options.variant = variant;
        options.adjustment = z_columns;
        const bool featureless =
            variant == Variant::naive || variant == Variant::confounding_adjusted;
        const RegressorSpec spec{variant, z_columns};
        EstimateReport report =
            estimate_variant(ds, spec, options, featureless ? scalar_weights : feature_weights);
        report.adjustment_auto_selected = !base_options.adjustment.has_value();
        out.emplace_back(variant, std::move(report));
    }
    return out;
}

PanelFixture make_panel_fixture(std::uint64_t seed) {
    constexpr int kUnits = 26;
    constexpr int kPeriods = 24;
    constexpr int kGridRows = 2;
    constexpr int kGridCols = 13;

    PanelFixture fx;
    fx.alpha0 = Eigen::Vector2d(0.5, 0.7);
    fx.alpha1 = Eigen::Vector2d(-0.8, -0.5);
    // every canton has neighbors, so the policy means are exactly (1, theta)
    fx.tau_gate = -fx.alpha0(0) + (fx.alpha0 + fx.alpha1).sum();

    std::vector<std::string> labels;
    for (int u = 0; u < kUnits; ++u) {
        std::ostringstream name;
        name << "c" << (u < 9 ? "0" : "") << (u + 1);
        labels.push_back(name.str());
    }

    // symmetric grid adjacency
    std::vector<std::vector<int>> nbrs(kUnits);
    std::ostringstream adjacency;
    for (int r = 0; r < kGridRows; ++r)
        for (int c = 0; c < kGridCols; ++c) {
            const int u = r * kGridCols + c;
            auto link = [&](int v) {
                nbrs[static_cast<std::size_t>(u)].push_back(v);
                nbrs[static_cast<std::size_t>(v)].push_back(u);
                adjacency << labels[static_cast<std::size_t>(u)] << "\t"
                          << labels[static_cast<std::size_t>(v)] << "\n";
                adjacency << labels[static_cast<std::size_t>(v)] << "\t"
                          << labels[static_cast<std::size_t>(u)] << "\n";
            };
            if (c + 1 < kGridCols) link(u + 1);
            if (r + 1 < kGridRows) link(u + kGridCols);
        }
    fx.adjacency_tsv = adjacency.str();

    // confounding channels deliberately strong so that ignoring them shows
    const Eigen::Vector3d gamma_d(0.8, -0.6, 0.5);
    const double gamma_h = 0.8;
    const Eigen::Vector3d gamma_m(0.2, -0.15, 0.1);
    const Eigen::Vector3d gamma_p(0.35, 0.3, -0.25);
    const double gamma_j = 0.6;

    Rng rng = Rng::stream(seed, {0xf1c5ull});
    auto logistic = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };

    std::vector<Eigen::Vector3d> d_static(kUnits);
    for (auto& d : d_static) d = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());

    // per (unit, period) draws, filled period by period
    Eigen::MatrixXd y(kUnits, kPeriods + 1), jcol(kUnits, kPeriods + 1), h(kUnits, kPeriods + 1);
    Eigen::MatrixXd w(kUnits, kPeriods + 1), x(kUnits, kPeriods + 1);
    std::vector<Eigen::MatrixXd> m(3, Eigen::MatrixXd(kUnits, kPeriods + 1));
    std::vector<Eigen::MatrixXd> p(3, Eigen::MatrixXd(kUnits, kPeriods + 1));

    for (int t = 1; t <= kPeriods; ++t) {
        for (int u = 0; u < kUnits; ++u) {
            jcol(u, t) = t <= 2 ? rng.normal() : y(u, t - 2); // burn-in, then lagged response
            h(u, t) = rng.bernoulli(0.3) ? 1.0 : 0.0;
            for (int k = 0; k < 3; ++k) m[static_cast<std::size_t>(k)](u, t) = rng.normal();
            const double e = rng.normal(); // unobserved policy driver
            for (int k = 0; k < 3; ++k)
                p[static_cast<std::size_t>(k)](u, t) =
                    rng.bernoulli(logistic(0.8 * e + 0.5 * jcol(u, t) + 0.2 * d_static[u](0) +
                                           0.3 * h(u, t) - 0.2))
                        ? 1.0
                        : 0.0;
            const double zw = -0.3 + 1.0 * d_static[u](0) - 0.8 * d_static[u](1) +
                              1.0 * h(u, t) + 0.8 * jcol(u, t) + 0.9 * e;
            w(u, t) = rng.bernoulli(logistic(zw)) ? 1.0 : 0.0;
        }
        for (int u = 0; u < kUnits; ++u) {
            double frac = 0.0;
            for (int v : nbrs[static_cast<std::size_t>(u)]) frac += w(v, t);
            x(u, t) = frac / static_cast<double>(nbrs[static_cast<std::size_t>(u)].size());
        }
        for (int u = 0; u < kUnits; ++u) {
            const double o = w(u, t) * x(u, t);
            double value = fx.alpha0(0) + fx.alpha0(1) * x(u, t) + fx.alpha1(0) * w(u, t) +
                           fx.alpha1(1) * o + gamma_d.dot(d_static[u]) + gamma_h * h(u, t) +
                           gamma_j * jcol(u, t);
            for (int k = 0; k < 3; ++k)
                value += gamma_m(k) * m[static_cast<std::size_t>(k)](u, t) +
                         gamma_p(k) * p[static_cast<std::size_t>(k)](u, t);
            y(u, t) = value + std::sqrt(0.3) * rng.normal();
        }
    }

    std::ostringstream csv;
    csv << "unit,week,G,W,H,D1,D2,D3,M1,M2,M3,P1,P2,P3\n";
    for (int u = 0; u < kUnits; ++u)
        for (int t = 1; t <= kPeriods; ++t) {
            const double g = t <= 2 ? rng.normal() : y(u, t - 2);
            csv << labels[static_cast<std::size_t>(u)] << "," << t << "," << format_double(g)
                << "," << format_double(w(u, t)) << "," << format_double(h(u, t));
            for (int k = 0; k < 3; ++k) csv << "," << format_double(d_static[u](k));
            for (int k = 0; k < 3; ++k)
                csv << "," << format_double(m[static_cast<std::size_t>(k)](u, t));
            for (int k = 0; k < 3; ++k)
                csv << "," << format_double(p[static_cast<std::size_t>(k)](u, t));
            csv << "\n";
        }
    fx.data_csv = csv.str();

    Dag g;
    g.add_node("D", NodeRole::covariate);
    g.add_node("H", NodeRole::covariate);
    g.add_node("E", NodeRole::covariate); // unobserved in the data
    g.add_node("J", NodeRole::covariate);
    g.add_node("M", NodeRole::covariate);
    g.add_node("P", NodeRole::covariate);
    g.add_node("W", NodeRole::treatment);
    g.add_node("X", NodeRole::feature_block);
    g.add_node("O", NodeRole::interaction_block);
    g.add_node("Y", NodeRole::outcome);
    for (const auto& [u, v] :
         std::vector<std::pair<const char*, const char*>>{{"D", "W"}, {"D", "P"}, {"D", "J"},
                                                          {"D", "Y"}, {"H", "W"}, {"H", "P"},
                                                          {"H", "Y"}, {"E", "W"}, {"E", "P"},
                                                          {"J", "W"}, {"J", "P"}, {"J", "Y"},
                                                          {"M", "Y"}, {"P", "Y"}, {"W", "O"},
                                                          {"X", "O"}, {"W", "Y"}, {"X", "Y"},
                                                          {"O", "Y"}})
        g.add_edge(u, v);
    g.validate();
    fx.graph = g;
    return fx;
}

} // namespace netfx
