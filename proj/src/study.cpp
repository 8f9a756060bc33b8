#include "netfx/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netfx/config.hpp"
#include "netfx/csv.hpp"
#include "netfx/depgraph.hpp"
#include "netfx/parallel.hpp"
#include "netfx/stats.hpp"
#include "netfx/svg.hpp"

namespace netfx {

void StudyConfig::validate() const {
    if (sizes.empty()) throw ConfigError("study needs a nonempty size list");
    if (nrep_graph < 1 || nrep_data < 1) throw ConfigError("replication counts must be >= 1");
    if (variants.empty()) throw ConfigError("study needs at least one estimator variant");
    if (!(pi >= 0.0 && pi <= 1.0 && eta >= 0.0 && eta <= 1.0))
        throw ConfigError("pi and eta must lie in [0,1]");
    sem.validate(features.p());
}

StudyConfig StudyConfig::from_config(const Config& cfg) {
    StudyConfig out;
    out.sizes = cfg.get_ints("study", "sizes");
    out.nrep_graph = static_cast<int>(cfg.get_int("study", "nrep_graph"));
    out.nrep_data = static_cast<int>(cfg.get_int("study", "nrep_data"));
    out.pi = cfg.get_double("study", "pi");
    out.eta = cfg.get_double("study", "eta");
    out.seed = static_cast<std::uint64_t>(cfg.get_int("study", "seed", 1));
    out.threads = static_cast<int>(cfg.get_int("study", "threads", 0));
    out.ci_level = cfg.get_double("study", "ci_level", 0.95);
    out.out_dir = cfg.get_string("study", "out_dir", "");
    if (cfg.has("study", "variants")) {
        out.variants.clear();
        for (const auto& name : cfg.get_strings("study", "variants"))
            out.variants.push_back(parse_variant(name));
    }
    if (cfg.has("study", "adjust")) out.adjustment = cfg.get_strings("study", "adjust");

    out.generator = parse_generator(cfg.get_string("network", "generator"));

    const double fill = cfg.get_double("features", "fill", 0.0);
    out.features = FeatureSpec::parse(cfg.get_string("features", "kinds", "frac-parents"), fill);

    out.sem = SemConfig::example_study(out.features.p());
    if (cfg.has("sem", "alpha0")) {
        const auto v = cfg.get_doubles("sem", "alpha0");
        out.sem.alpha0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    }
    if (cfg.has("sem", "alpha1")) {
        const auto v = cfg.get_doubles("sem", "alpha1");
        out.sem.alpha1 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    }
    if (cfg.has("sem", "gamma")) {
        const auto v = cfg.get_doubles("sem", "gamma");
        out.sem.gamma = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    }
    if (cfg.has("sem", "c_intercepts")) {
        const auto v = cfg.get_doubles("sem", "c_intercepts");
        out.sem.c_intercepts =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    }
    if (cfg.has("sem", "treat_coef")) {
        const auto v = cfg.get_doubles("sem", "treat_coef");
        out.sem.treat_coef =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    }
    out.sem.treat_intercept = cfg.get_double("sem", "treat_intercept", out.sem.treat_intercept);
    if (cfg.has("sem", "c_links")) {
        // semicolon list of dst:src:coef triples, 1-based indices
        out.sem.c_links.clear();
        for (const auto& item : split_list(cfg.get_string("sem", "c_links"), ';')) {
            const auto parts = split_list(item, ':');
            if (parts.size() != 3)
                throw ConfigError("sem.c_links entries must look like dst:src:coef");
            out.sem.c_links.emplace_back(std::stoi(parts[0]) - 1, std::stoi(parts[1]) - 1,
                                         std::stod(parts[2]));
        }
    }
    if (cfg.has("sem", "c_noise")) {
        const auto items = cfg.get_strings("sem", "c_noise");
        if (items.size() == 1) {
            out.sem.c_noise.assign(static_cast<std::size_t>(out.sem.dc()),
                                   NoiseSpec::parse(items[0]));
        } else {
            out.sem.c_noise.clear();
            for (const auto& item : items) out.sem.c_noise.push_back(NoiseSpec::parse(item));
        }
    }
    if (cfg.has("sem", "y_noise")) out.sem.y_noise = NoiseSpec::parse(cfg.get_string("sem", "y_noise"));

    out.validate();
    return out;
}

const CellResult& MetricsTable::cell(int size_ix, int graph_rep) const {
    const std::size_t per_size = cells.size() / sizes.size();
    return cells[static_cast<std::size_t>(size_ix) * per_size + static_cast<std::size_t>(graph_rep)];
}

int MetricsTable::size_index(int n) const {
    for (std::size_t s = 0; s < sizes.size(); ++s)
        if (sizes[s] == n) return static_cast<int>(s);
    throw ConfigError("size " + std::to_string(n) + " not part of this study");
}

int MetricsTable::variant_index(Variant v) const {
    for (std::size_t k = 0; k < variants.size(); ++k)
        if (variants[k] == v) return static_cast<int>(k);
    throw ConfigError("variant '" + to_string(v) + "' not part of this study");
}

CellMetrics MetricsTable::cell_metrics(const CellResult& cell, int variant_ix) {
    CellMetrics m;
    std::vector<double> taus;
    for (double t : cell.tau_hat[static_cast<std::size_t>(variant_ix)])
        if (std::isfinite(t)) taus.push_back(t);
    m.n_used = static_cast<int>(taus.size());
    if (taus.empty()) return m;
    double mse = 0.0;
    for (double t : taus) mse += (t - cell.tau_true) * (t - cell.tau_true);
    mse /= static_cast<double>(taus.size());
    m.rmse = std::sqrt(mse);
    m.bias = mean(taus) - cell.tau_true;
    m.variance = variance(taus);
    return m;
}

MetricsTable run_study(const StudyConfig& cfg) {
    cfg.validate();
    const std::size_t n_sizes = cfg.sizes.size();
    const std::size_t n_graphs = static_cast<std::size_t>(cfg.nrep_graph);
    const std::size_t n_variants = cfg.variants.size();
    const std::size_t n_cells = n_sizes * n_graphs;

    MetricsTable table;
    table.sizes = cfg.sizes;
    table.variants = cfg.variants;
    table.pi = cfg.pi;
    table.eta = cfg.eta;
    table.ci_level = cfg.ci_level;
    table.cells.resize(n_cells);

    parallel_for(n_cells, cfg.threads, [&](std::size_t cell_ix) {
        const std::size_t size_ix = cell_ix / n_graphs;
        const int graph_rep = static_cast<int>(cell_ix % n_graphs);
        const int n = cfg.sizes[size_ix];

        Rng net_rng = Rng::stream(cfg.seed, {0x4e37ull, static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(graph_rep)});
        auto net = std::make_shared<InteractionNetwork>(
            generate_network(cfg.generator, n, net_rng));
        const FeatureComputer fc(*net, cfg.features);
        const Weights feature_weights = closed_form_weights(fc, cfg.pi, cfg.eta);
        const Weights scalar_weights = intercept_only_weights(cfg.pi, cfg.eta);

        CellResult& cell = table.cells[cell_ix];
        cell.n = n;
        cell.graph_rep = graph_rep;
        cell.tau_true = true_tau(cfg.sem, feature_weights);
        cell.d_max = dependency_graph(*net, cfg.features).max_degree();
        cell.tau_hat.assign(n_variants, std::vector<double>(
                                            static_cast<std::size_t>(cfg.nrep_data),
                                            std::numeric_limits<double>::quiet_NaN()));
        cell.sigma2_hat = cell.tau_hat;
        cell.n_singular.assign(n_variants, 0);

        EstimateOptions options;
        options.pi = cfg.pi;
        options.eta = cfg.eta;
        options.ci_level = cfg.ci_level;
        options.compute_d_max = false;

        for (int rep = 0; rep < cfg.nrep_data; ++rep) {
            Rng data_rng = Rng::stream(cfg.seed, {0xda7aull, static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(graph_rep),
                                                  static_cast<std::uint64_t>(rep)});
            const Dataset ds = simulate(cfg.sem, net, fc, data_rng);
            for (std::size_t v = 0; v < n_variants; ++v) {
                const Variant variant = cfg.variants[v];
                const bool featureless =
                    variant == Variant::naive || variant == Variant::confounding_adjusted;
                const RegressorSpec spec{variant, cfg.adjustment};
                options.variant = variant;
                try {
                    const EstimateReport report = estimate_variant(
                        ds, spec, options, featureless ? scalar_weights : feature_weights);
                    cell.tau_hat[v][static_cast<std::size_t>(rep)] = report.tau_hat;
                    cell.sigma2_hat[v][static_cast<std::size_t>(rep)] = report.sigma2_hat;
                } catch (const NumericalError&) {
                    ++cell.n_singular[v]; // tallied, never aborts the study
                }
            }
        }
    });

    table.rmse.assign(n_sizes, std::vector<double>(n_variants, 0.0));
    table.bias = table.rmse;
    table.log_variance = table.rmse;
    table.singular.assign(n_sizes, std::vector<int>(n_variants, 0));
    for (std::size_t s = 0; s < n_sizes; ++s) {
        for (std::size_t v = 0; v < n_variants; ++v) {
            double rmse_sum = 0.0, bias_sum = 0.0, logvar_sum = 0.0;
            int graphs_used = 0;
            for (std::size_t g = 0; g < n_graphs; ++g) {
                const CellResult& cell = table.cells[s * n_graphs + g];
                const CellMetrics m = MetricsTable::cell_metrics(cell, static_cast<int>(v));
                table.singular[s][v] += cell.n_singular[v];
                if (m.n_used < 2) continue;
                rmse_sum += m.rmse;
                bias_sum += m.bias;
                logvar_sum += std::log(m.variance);
                ++graphs_used;
            }
            if (graphs_used > 0) {
                table.rmse[s][v] = rmse_sum / graphs_used;
                table.bias[s][v] = bias_sum / graphs_used;
                table.log_variance[s][v] = logvar_sum / graphs_used;
            } else {
                table.rmse[s][v] = table.bias[s][v] = table.log_variance[s][v] =
                    std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return table;
}

double variance_slope(const MetricsTable& table, Variant variant) {
    if (table.sizes.size() < 2) throw ConfigError("variance_slope needs at least two sizes");
    const int v = table.variant_index(variant);
    std::vector<double> log_n, log_var;
    for (std::size_t s = 0; s < table.sizes.size(); ++s) {
        log_n.push_back(std::log(static_cast<double>(table.sizes[s])));
        log_var.push_back(table.log_variance[s][static_cast<std::size_t>(v)]);
    }
    return ols_slope(log_n, log_var);
}

namespace {

// Null distribution of the estimated-moment KS statistic, tabled once per
// sample size with a fixed internal seed.
const std::vector<double>& lilliefors_null_table(std::size_t sample_size) {
    static std::map<std::size_t, std::vector<double>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(sample_size);
    if (it != cache.end()) return it->second;
    constexpr int kNullReps = 3000;
    Rng rng = Rng::stream(0x11f0u, {static_cast<std::uint64_t>(sample_size)});
    std::vector<double> dist;
    dist.reserve(kNullReps);
    std::vector<double> draw(sample_size);
    for (int r = 0; r < kNullReps; ++r) {
        for (auto& x : draw) x = rng.normal();
        dist.push_back(lilliefors_statistic(std::vector<double>(draw)));
    }
    std::sort(dist.begin(), dist.end());
    return cache.emplace(sample_size, std::move(dist)).first->second;
}

double lilliefors_pvalue_tabled(const std::vector<double>& sample) {
    const double observed = lilliefors_statistic(std::vector<double>(sample));
    const auto& null = lilliefors_null_table(sample.size());
    const auto lower = std::lower_bound(null.begin(), null.end(), observed);
    const std::size_t at_least = static_cast<std::size_t>(null.end() - lower);
    return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(null.size()) + 1.0);
}

} // namespace

NormalityResult normality_diagnostic(const MetricsTable& table, Variant variant, int n) {
    if (n < 0) n = table.sizes.back();
    const int size_ix = table.size_index(n);
    const int v = table.variant_index(variant);
    const std::size_t n_graphs = table.cells.size() / table.sizes.size();

    NormalityResult out;
    out.n = n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (std::size_t g = 0; g < n_graphs; ++g) {
        const CellResult& cell = table.cell(size_ix, static_cast<int>(g));
        std::vector<double> sample;
        for (double t : cell.tau_hat[static_cast<std::size_t>(v)])
            if (std::isfinite(t)) sample.push_back(sqrt_n * (t - cell.tau_true));
        if (sample.size() < 20) continue; // too few replications for the test
        out.p_values.push_back(lilliefors_pvalue_tabled(sample));
    }
    out.ks_to_uniform = ks_distance_to_uniform(std::vector<double>(out.p_values));
    return out;
}

NormalityResult normality_diagnostic(const StudyConfig& cfg, Variant variant) {
    if (cfg.nrep_data < 20)
        throw ConfigError("normality diagnostic needs nrep_data >= 20");
    return normality_diagnostic(run_study(cfg), variant);
}

std::vector<double> variance_estimator_check(const MetricsTable& table, Variant variant) {
    const int v = table.variant_index(variant);
    const std::size_t n_graphs = table.cells.size() / table.sizes.size();
    std::vector<double> out;
    for (std::size_t s = 0; s < table.sizes.size(); ++s) {
        const double n = static_cast<double>(table.sizes[s]);
        // pooled empirical variance across all replications of this size
        // (per-graph centered, then averaged over the network draws)
        double v_pooled = 0.0;
        int graphs_used = 0;
        for (std::size_t g = 0; g < n_graphs; ++g) {
            const CellMetrics m = MetricsTable::cell_metrics(
                table.cell(static_cast<int>(s), static_cast<int>(g)), v);
            if (m.n_used < 2) continue;
            v_pooled += m.variance;
            ++graphs_used;
        }
        if (graphs_used == 0) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        v_pooled /= static_cast<double>(graphs_used);

        double sq_sum = 0.0;
        std::size_t count = 0;
        for (std::size_t g = 0; g < n_graphs; ++g) {
            const CellResult& cell = table.cell(static_cast<int>(s), static_cast<int>(g));
            for (double s2 : cell.sigma2_hat[static_cast<std::size_t>(v)]) {
                if (!std::isfinite(s2)) continue;
                const double err = s2 / n - v_pooled;
                sq_sum += err * err;
                ++count;
            }
        }
        out.push_back(count == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : n * std::sqrt(sq_sum / static_cast<double>(count)));
    }
    return out;
}

double ci_coverage(const MetricsTable& table, Variant variant, int n) {
    const int size_ix = table.size_index(n);
    const int v = table.variant_index(variant);
    const std::size_t n_graphs = table.cells.size() / table.sizes.size();
    const double z = normal_quantile(1.0 - (1.0 - table.ci_level) / 2.0);
    std::size_t covered = 0, total = 0;
    for (std::size_t g = 0; g < n_graphs; ++g) {
        const CellResult& cell = table.cell(size_ix, static_cast<int>(g));
        const auto& taus = cell.tau_hat[static_cast<std::size_t>(v)];
        const auto& sig = cell.sigma2_hat[static_cast<std::size_t>(v)];
        for (std::size_t r = 0; r < taus.size(); ++r) {
            if (!std::isfinite(taus[r]) || !std::isfinite(sig[r])) continue;
            const double half = z * std::sqrt(sig[r] / static_cast<double>(n));
            if (std::abs(taus[r] - cell.tau_true) <= half) ++covered;
            ++total;
        }
    }
    if (total == 0) throw NumericalError("no successful fits for coverage");
    return static_cast<double>(covered) / static_cast<double>(total);
}

void write_study_outputs(const StudyConfig& cfg, const MetricsTable& table,
                         const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    auto write_metric = [&](const std::string& name,
                            const std::vector<std::vector<double>>& values) {
        std::ofstream out(dir + "/metrics_" + name + ".csv");
        std::vector<std::string> header{"N"};
        for (Variant v : table.variants) header.push_back(to_string(v));
        write_csv_header(out, header);
        for (std::size_t s = 0; s < table.sizes.size(); ++s) {
            out << table.sizes[s];
            for (std::size_t v = 0; v < table.variants.size(); ++v)
                out << "," << format_double(values[s][v]);
            out << "\n";
        }
    };
    write_metric("rmse", table.rmse);
    write_metric("bias", table.bias);
    write_metric("logvar", table.log_variance);

    {
        std::ofstream out(dir + "/raw_per_graph.csv");
        write_csv_header(out, {"N", "graph", "variant", "rmse", "bias", "variance", "n_used",
                               "n_singular", "tau_true", "d_max"});
        const std::size_t n_graphs = table.cells.size() / table.sizes.size();
        for (std::size_t s = 0; s < table.sizes.size(); ++s)
            for (std::size_t g = 0; g < n_graphs; ++g) {
                const CellResult& cell = table.cell(static_cast<int>(s), static_cast<int>(g));
                for (std::size_t v = 0; v < table.variants.size(); ++v) {
                    const CellMetrics m = MetricsTable::cell_metrics(cell, static_cast<int>(v));
                    out << cell.n << "," << cell.graph_rep << "," << to_string(table.variants[v])
                        << "," << format_double(m.rmse) << "," << format_double(m.bias) << ","
                        << format_double(m.variance) << "," << m.n_used << ","
                        << cell.n_singular[v] << "," << format_double(cell.tau_true) << ","
                        << cell.d_max << "\n";
                }
            }
    }

    {
        nlohmann::json manifest;
        manifest["generator"] = describe(cfg.generator);
        manifest["features"] = cfg.features.describe();
        manifest["sizes"] = cfg.sizes;
        manifest["nrep_graph"] = cfg.nrep_graph;
        manifest["nrep_data"] = cfg.nrep_data;
        manifest["pi"] = cfg.pi;
        manifest["eta"] = cfg.eta;
        manifest["seed"] = cfg.seed;
        manifest["threads_requested"] = cfg.threads;
        manifest["ci_level"] = cfg.ci_level;
        manifest["adjustment"] = cfg.adjustment;
        std::vector<std::string> variant_names;
        for (Variant v : cfg.variants) variant_names.push_back(to_string(v));
        manifest["variants"] = variant_names;
        manifest["sem"]["alpha0"] =
            std::vector<double>(cfg.sem.alpha0.begin(), cfg.sem.alpha0.end());
        manifest["sem"]["alpha1"] =
            std::vector<double>(cfg.sem.alpha1.begin(), cfg.sem.alpha1.end());
        manifest["sem"]["gamma"] = std::vector<double>(cfg.sem.gamma.begin(), cfg.sem.gamma.end());
        manifest["sem"]["y_noise"] = cfg.sem.y_noise.str();
        manifest["sem"]["y_noise_note"] =
            "uniform outcome noise is mean-zero on +-sqrt(3 v), variance matched";
        nlohmann::json singular = nlohmann::json::object();
        for (std::size_t s = 0; s < table.sizes.size(); ++s)
            for (std::size_t v = 0; v < table.variants.size(); ++v)
                if (table.singular[s][v] > 0)
                    singular[std::to_string(table.sizes[s]) + "/" + to_string(table.variants[v])] =
                        table.singular[s][v];
        manifest["singular_fits"] = singular;
        std::ofstream out(dir + "/manifest.json");
        out << manifest.dump(2) << "\n";
    }

    // p-value ecdf of the scaled-estimator normality check at the largest size
    if (cfg.nrep_data >= 20) {
        std::ofstream out(dir + "/normality_pvalues.csv");
        write_csv_header(out, {"variant", "rank", "p_value", "ecdf"});
        nlohmann::json ks = nlohmann::json::object();
        for (Variant v : table.variants) {
            NormalityResult res = normality_diagnostic(table, v);
            std::sort(res.p_values.begin(), res.p_values.end());
            for (std::size_t k = 0; k < res.p_values.size(); ++k)
                out << to_string(v) << "," << (k + 1) << "," << format_double(res.p_values[k])
                    << ","
                    << format_double(static_cast<double>(k + 1) /
                                     static_cast<double>(res.p_values.size()))
                    << "\n";
            ks[to_string(v)] = res.ks_to_uniform;
        }
        std::ofstream ks_out(dir + "/normality_ks.json");
        ks_out << ks.dump(2) << "\n";
    }

    auto plot_metric = [&](const std::string& name, const std::vector<std::vector<double>>& values,
                           const std::string& y_label, bool log_y) {
        SvgPlotSpec spec;
        spec.title = name + " vs N (" + describe(cfg.generator) + ")";
        spec.x_label = "N (log scale)";
        spec.y_label = y_label;
        spec.log_x = true;
        spec.log_y = log_y;
        std::vector<SvgSeries> series;
        for (std::size_t v = 0; v < table.variants.size(); ++v) {
            SvgSeries s;
            s.label = to_string(table.variants[v]);
            for (std::size_t sz = 0; sz < table.sizes.size(); ++sz) {
                s.x.push_back(static_cast<double>(table.sizes[sz]));
                s.y.push_back(values[sz][v]);
            }
            series.push_back(std::move(s));
        }
        std::ofstream out(dir + "/" + name + ".svg");
        out << render_line_plot(spec, series);
    };
    plot_metric("rmse", table.rmse, "average RMSE (log scale)", true);
    plot_metric("bias", table.bias, "average bias", false);
    plot_metric("logvar", table.log_variance, "average log empirical variance", false);
}

} // namespace netfx
