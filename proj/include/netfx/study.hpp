#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netfx/estimator.hpp"
#include "netfx/generators.hpp"
#include "netfx/sem.hpp"

namespace netfx {

class Config;

struct StudyConfig {
    NetworkGenerator generator;
    std::vector<int> sizes;
    int nrep_graph = 50;
    int nrep_data = 100;
    SemConfig sem;
    FeatureSpec features{FeatureSpec::parse("frac-parents")};
    double pi = 0.7;
    double eta = 0.2;
    std::vector<Variant> variants{Variant::naive, Variant::confounding_adjusted,
                                  Variant::interference_adjusted, Variant::fully_adjusted};
    std::vector<std::string> adjustment{"C2"};
    std::uint64_t seed = 1;
    int threads = 0;
    double ci_level = 0.95;
    std::string out_dir; // empty: in-memory only

    void validate() const;
    static StudyConfig from_config(const Config& cfg);
};

// One (size, network draw) cell with everything the diagnostics need later:
// per-replication estimates and variance estimates per variant, the cell's
// true effect, and the dependency-graph degree.
struct CellResult {
    int n = 0;
    int graph_rep = 0;
    double tau_true = 0.0;
    int d_max = 0;
    std::vector<std::vector<double>> tau_hat;    // [variant][data rep], NaN for failed fits
    std::vector<std::vector<double>> sigma2_hat; // same shape
    std::vector<int> n_singular;                 // [variant]
};

struct CellMetrics {
    double rmse = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    int n_used = 0;
};

struct MetricsTable {
    std::vector<int> sizes;
    std::vector<Variant> variants;
    double pi = 0.0, eta = 0.0;
    double ci_level = 0.95;

    // averaged over graphs, [size][variant]
    std::vector<std::vector<double>> rmse;
    std::vector<std::vector<double>> bias;
    std::vector<std::vector<double>> log_variance;
    std::vector<std::vector<int>> singular; // total failed fits

    // per-graph raw values
    std::vector<CellResult> cells; // ordered (size-major, then graph rep)

    const CellResult& cell(int size_ix, int graph_rep) const;
    int size_index(int n) const;
    int variant_index(Variant v) const;
    static CellMetrics cell_metrics(const CellResult& cell, int variant_ix);
};

// Nested replication loops: per size draw nrep_graph networks, per network
// nrep_data datasets, fit every variant. The per-graph true effect comes from
// the closed-form weights. Deterministic for a given seed at any thread count.
MetricsTable run_study(const StudyConfig& cfg);

// least-squares slope of the averaged log empirical variance on log N
double variance_slope(const MetricsTable& table, Variant variant);

struct NormalityResult {
    int n = 0;
    std::vector<double> p_values;  // one per network draw
    double ks_to_uniform = 0.0;    // distance of the p-value ecdf to Unif(0,1)
};

// Goodness-of-fit of sqrt(N)(tau_hat - tau) against a normal with estimated
// moments, via the Monte Carlo tabled KS statistic. Runs on the retained raw
// replications at the requested size (default: the largest).
NormalityResult normality_diagnostic(const MetricsTable& table, Variant variant, int n = -1);
NormalityResult normality_diagnostic(const StudyConfig& cfg, Variant variant);

// Scaled-to-N RMSE of sigma2_hat/N against the per-graph empirical variance
// of tau_hat, one value per size.
std::vector<double> variance_estimator_check(const MetricsTable& table, Variant variant);

// per-(graph, rep) CI coverage of the per-graph true effect at one size
double ci_coverage(const MetricsTable& table, Variant variant, int n);

// metric CSVs (rows = N, columns = variant), raw per-graph CSV, JSON manifest,
// and SVG line plots, written under dir.
void write_study_outputs(const StudyConfig& cfg, const MetricsTable& table,
                         const std::string& dir);

} // namespace netfx
