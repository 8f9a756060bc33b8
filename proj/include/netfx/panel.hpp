#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netfx/estimator.hpp"
#include "netfx/graph.hpp"
#include "netfx/sem.hpp"

namespace netfx {

// Column derived by shifting another column within a unit's own time series:
// value(i, t) = source(i, t + shift). Rows where the source period is missing
// drop out of the usable set (and are counted).
struct DerivedColumn {
    std::string name;
    std::string source;
    int shift = 0; // positive: lead, negative: lag
};

struct PanelSchema {
    std::string unit_col = "unit";
    std::string time_col = "week";
    std::string treatment_col = "W";
    std::string response; // possibly derived
    std::vector<DerivedColumn> derived;
    std::vector<std::string> covariates; // column names, raw or derived

    // response = lead-2 of the case-growth column G, information column
    // J = lag-2 of the response, covariates D1..3, H, M1..3, P1..3, J
    static PanelSchema swiss();
};

struct PanelDataset {
    Dataset data; // rows are usable (unit, period) pairs; network links same-period neighbors
    std::vector<std::pair<std::string, int>> row_keys; // (unit label, period)
    int n_input_rows = 0;
    int n_dropped = 0;
};

// Reads the panel CSV and the unit-level adjacency TSV (`u<TAB>v` per line,
// unit labels as in the data), derives the schema columns, computes the
// same-period fraction-of-treated-neighbors feature, and assembles a unit
// dataset over the usable rows.
PanelDataset ingest_panel(std::istream& data_csv, std::istream& adjacency_tsv,
                          const PanelSchema& schema);
PanelDataset ingest_panel_files(const std::string& data_path, const std::string& adjacency_path,
                                const PanelSchema& schema);

// Runs the requested estimator variants on the panel. The generic graph
// supplies the adjustment candidates; covariate nodes expand to data columns
// by exact name or by `<node><digits>` blocks. Adjustment defaults to the
// smallest valid set among observed candidate nodes.
std::vector<std::pair<Variant, EstimateReport>> run_observational(
    const PanelDataset& pd, const Dag& generic, const std::vector<Variant>& variants, double pi,
    double eta, const EstimateOptions& base_options = {});

// Synthetic panel of the same schema as the facial-mask analysis, generated
// from the linear interference outcome model with known coefficients and
// deliberate confounding through the policy and information covariates.
struct PanelFixture {
    std::string data_csv;
    std::string adjacency_tsv;
    Dag graph;
    Eigen::VectorXd alpha0;
    Eigen::VectorXd alpha1;
    double tau_gate = 0.0; // omega' decomposition value of tau(1, 0)
};

PanelFixture make_panel_fixture(std::uint64_t seed);

} // namespace netfx
