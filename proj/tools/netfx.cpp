// netfx: global treatment effects from observational network data under
// interference and confounding. Subcommands cover graph queries, dependency
// diagnostics, simulation studies, estimation, and the panel workflow.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netfx/config.hpp"
#include "netfx/depgraph.hpp"
#include "netfx/error.hpp"
#include "netfx/estimator.hpp"
#include "netfx/graph.hpp"
#include "netfx/panel.hpp"
#include "netfx/slopes.hpp"
#include "netfx/stats.hpp"
#include "netfx/study.hpp"

namespace {

netfx::NodeSet parse_node_list(const std::string& text) {
    netfx::NodeSet out;
    for (const auto& item : netfx::split_list(text)) out.insert(item);
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw netfx::ConfigError("cannot write file '" + path + "'");
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"treatment-effect estimation on networks with interference"};
    app.require_subcommand(1);

    // --- dsep ---
    auto* dsep = app.add_subcommand("dsep", "d-separation query on a graph file");
    std::string dsep_graph, dsep_a, dsep_b, dsep_z;
    dsep->add_option("--graph", dsep_graph, "graph file")->required();
    dsep->add_option("--a", dsep_a, "first node set, comma separated")->required();
    dsep->add_option("--b", dsep_b, "second node set")->required();
    dsep->add_option("--z", dsep_z, "conditioning set (may be empty)");

    // --- adjsets ---
    auto* adjsets = app.add_subcommand("adjsets", "enumerate valid adjustment sets");
    std::string adj_graph, adj_exposure, adj_outcome, adj_candidates;
    adjsets->add_option("--graph", adj_graph, "graph file")->required();
    adjsets->add_option("--exposure", adj_exposure, "exposure nodes, e.g. X,W,O")->required();
    adjsets->add_option("--outcome", adj_outcome, "outcome node")->required();
    adjsets->add_option("--candidates", adj_candidates,
                        "candidate nodes (default: all covariate-role nodes)");

    // --- depgraph ---
    auto* dep = app.add_subcommand("depgraph", "interference dependency graph of a network");
    std::string dep_network, dep_feature = "frac-parents";
    dep->add_option("--network", dep_network, "network TSV file")->required();
    dep->add_option("--feature", dep_feature, "feature kinds, comma separated");

    // --- slopes ---
    auto* slopes = app.add_subcommand("slopes", "degree-scaling slope of the dependency graph");
    std::string sl_generator, sl_feature = "frac-parents", sl_sizes = "300,600,1200,2400,4800";
    int sl_reps = 100, sl_threads = 0;
    std::uint64_t sl_seed = 1;
    slopes->add_option("--generator", sl_generator, "er:<p>|family|lattice2d")->required();
    slopes->add_option("--feature", sl_feature, "feature kinds");
    slopes->add_option("--sizes", sl_sizes, "comma separated unit counts");
    slopes->add_option("--reps", sl_reps, "networks per size");
    slopes->add_option("--seed", sl_seed, "master seed");
    slopes->add_option("--threads", sl_threads, "worker threads (0 = hardware)");

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "draw one dataset from the study model");
    std::string sim_config, sim_out, sim_net_out;
    int sim_n = 0;
    std::uint64_t sim_seed = 1;
    sim->add_option("--config", sim_config, "study config file")->required();
    sim->add_option("--n", sim_n, "unit count")->required();
    sim->add_option("--seed", sim_seed, "seed");
    sim->add_option("--out", sim_out, "output CSV path")->required();
    sim->add_option("--network-out", sim_net_out, "also write the drawn network TSV");

    // --- estimate ---
    auto* est = app.add_subcommand("estimate", "fit an estimator on a dataset CSV");
    std::string est_data, est_graph, est_network, est_feature = "frac-parents";
    std::string est_variant = "full", est_adjust = "auto", est_weights = "closed", est_out;
    double est_pi = 1.0, est_eta = 0.0, est_level = 0.95;
    int est_mc_reps = 1000;
    std::uint64_t est_seed = 1;
    est->add_option("--data", est_data, "dataset CSV")->required();
    est->add_option("--graph", est_graph, "generic graph file (needed for --adjust auto)");
    est->add_option("--network", est_network, "interaction network TSV (for weights/diagnostics)");
    est->add_option("--feature", est_feature, "feature kinds matching the dataset");
    est->add_option("--pi", est_pi, "policy probability pi")->required();
    est->add_option("--eta", est_eta, "policy probability eta")->required();
    est->add_option("--variant", est_variant, "naive|confounding|interference|full");
    est->add_option("--adjust", est_adjust, "auto or comma-separated covariates");
    est->add_option("--weights", est_weights, "closed|mc");
    est->add_option("--mc-reps", est_mc_reps, "Monte Carlo weight replications");
    est->add_option("--seed", est_seed, "Monte Carlo weight seed");
    est->add_option("--level", est_level, "confidence level");
    est->add_option("--out", est_out, "write the JSON report here (default: stdout)");

    // --- study ---
    auto* study = app.add_subcommand("study", "run a replication study from a config file");
    std::string study_config;
    study->add_option("--config", study_config, "study config file")->required();

    // --- panel ---
    auto* panel = app.add_subcommand("panel", "four-estimator comparison on a panel dataset");
    std::string pn_data, pn_adj, pn_graph, pn_schema = "builtin:swiss", pn_adjust = "auto", pn_out;
    double pn_pi = 1.0, pn_eta = 0.0;
    panel->add_option("--data", pn_data, "panel CSV")->required();
    panel->add_option("--adjacency", pn_adj, "unit adjacency TSV")->required();
    panel->add_option("--graph", pn_graph, "generic graph file")->required();
    panel->add_option("--schema", pn_schema, "builtin:swiss (the shipped schema)");
    panel->add_option("--pi", pn_pi, "policy probability pi");
    panel->add_option("--eta", pn_eta, "policy probability eta");
    panel->add_option("--adjust", pn_adjust, "auto or comma-separated covariate blocks");
    panel->add_option("--out", pn_out, "write the JSON table here (default: stdout)");

    // --- panel-fixture ---
    auto* fixture = app.add_subcommand("panel-fixture",
                                       "emit the synthetic facial-mask-style panel fixture");
    std::string fx_dir;
    std::uint64_t fx_seed = 7;
    fixture->add_option("--out", fx_dir, "output directory")->required();
    fixture->add_option("--seed", fx_seed, "fixture seed");

    CLI11_PARSE(app, argc, argv);

    if (*dsep) {
        const netfx::Dag g = netfx::parse_dag_file(dsep_graph);
        const bool sep = netfx::d_separated(g, parse_node_list(dsep_a), parse_node_list(dsep_b),
                                            parse_node_list(dsep_z));
        std::cout << (sep ? "d-separated" : "not d-separated") << "\n";
        return 0;
    }

    if (*adjsets) {
        const netfx::Dag g = netfx::parse_dag_file(adj_graph);
        netfx::NodeSet candidates;
        if (!adj_candidates.empty()) {
            candidates = parse_node_list(adj_candidates);
        } else {
            for (const auto& node : g.nodes_with_role(netfx::NodeRole::covariate))
                candidates.insert(node);
        }
        const auto sets = netfx::enumerate_valid_adjustment_sets(g, parse_node_list(adj_exposure),
                                                                 adj_outcome, candidates);
        for (const auto& z : sets) {
            if (z.empty()) {
                std::cout << "{}\n";
                continue;
            }
            bool first = true;
            for (const auto& id : z) {
                std::cout << (first ? "" : ",") << id;
                first = false;
            }
            std::cout << "\n";
        }
        std::cerr << sets.size() << " valid adjustment set(s)\n";
        return 0;
    }

    if (*dep) {
        const netfx::InteractionNetwork net = netfx::read_network_tsv_file(dep_network);
        const netfx::FeatureSpec spec = netfx::FeatureSpec::parse(dep_feature);
        const netfx::DependencyGraph d = netfx::dependency_graph(net, spec);
        for (const auto& [i, j] : d.edges()) std::cout << (i + 1) << "\t" << (j + 1) << "\n";
        std::cerr << "max degree " << d.max_degree() << "\n";
        return 0;
    }

    if (*slopes) {
        const auto generator = netfx::parse_generator(sl_generator);
        const auto spec = netfx::FeatureSpec::parse(sl_feature);
        std::vector<int> sizes;
        for (const auto& s : netfx::split_list(sl_sizes)) sizes.push_back(std::stoi(s));
        const auto result =
            netfx::degree_scaling_slope(generator, spec, sizes, sl_reps, sl_seed, sl_threads);
        for (std::size_t s = 0; s < result.sizes.size(); ++s)
            std::cout << "N=" << result.sizes[s] << " avg_dmax=" << result.avg_max_degree[s]
                      << "\n";
        std::cout << "slope " << result.slope << "\n";
        return 0;
    }

    if (*sim) {
        netfx::Config raw = netfx::Config::parse_file(sim_config);
        netfx::StudyConfig cfg = netfx::StudyConfig::from_config(raw);
        netfx::Rng net_rng = netfx::Rng::stream(sim_seed, {0x4e37ull,
                                                           static_cast<std::uint64_t>(sim_n), 0});
        auto net = std::make_shared<netfx::InteractionNetwork>(
            netfx::generate_network(cfg.generator, sim_n, net_rng));
        netfx::Rng data_rng =
            netfx::Rng::stream(sim_seed, {0xda7aull, static_cast<std::uint64_t>(sim_n), 0, 0});
        const netfx::FeatureComputer fc(*net, cfg.features);
        const netfx::Dataset ds = netfx::simulate(cfg.sem, net, fc, data_rng);
        std::ofstream out(sim_out);
        if (!out) throw netfx::ConfigError("cannot write '" + sim_out + "'");
        netfx::write_dataset_csv(ds, out);
        if (!sim_net_out.empty()) {
            std::ofstream nout(sim_net_out);
            if (!nout) throw netfx::ConfigError("cannot write '" + sim_net_out + "'");
            netfx::write_network_tsv(*net, nout);
        }
        return 0;
    }

    if (*est) {
        netfx::Dataset ds = netfx::read_dataset_csv_file(est_data);
        if (!est_network.empty()) {
            ds.network = std::make_shared<netfx::InteractionNetwork>(
                netfx::read_network_tsv_file(est_network));
            ds.feature_spec = netfx::FeatureSpec::parse(est_feature);
        }
        netfx::EstimateOptions options;
        options.pi = est_pi;
        options.eta = est_eta;
        options.variant = netfx::parse_variant(est_variant);
        options.prefer_closed_form = est_weights == "closed";
        options.mc_reps = est_mc_reps;
        options.mc_seed = est_seed;
        options.ci_level = est_level;
        if (est_adjust != "auto") options.adjustment = netfx::split_list(est_adjust);

        netfx::EstimateReport report;
        if (options.variant == netfx::Variant::fully_adjusted) {
            // graph-backed pipeline: auto-selects or validates the adjustment set
            if (est_graph.empty())
                throw netfx::ConfigError("the fully adjusted variant needs --graph for the "
                                         "adjustment-set validity check");
            report = netfx::adjust_and_estimate(ds, netfx::parse_dag_file(est_graph), options);
        } else {
            const bool featureless = options.variant == netfx::Variant::naive ||
                                     options.variant == netfx::Variant::confounding_adjusted;
            netfx::Weights weights;
            if (featureless) {
                weights = netfx::intercept_only_weights(est_pi, est_eta);
            } else {
                if (!ds.network)
                    throw netfx::ConfigError(
                        "feature-based variants need --network for the policy weights");
                const netfx::FeatureComputer fc(*ds.network, *ds.feature_spec);
                weights = options.prefer_closed_form && ds.feature_spec->has_closed_form()
                              ? netfx::closed_form_weights(fc, est_pi, est_eta)
                              : netfx::mc_weights(fc, est_pi, est_eta, est_mc_reps, est_seed);
            }
            netfx::RegressorSpec spec{options.variant,
                                      options.adjustment.value_or(std::vector<std::string>{})};
            report = netfx::estimate_variant(ds, spec, options, weights);
        }
        const std::string json = netfx::report_to_json(report);
        if (est_out.empty())
            std::cout << json << "\n";
        else
            write_text_file(est_out, json + "\n");
        return 0;
    }

    if (*study) {
        netfx::Config raw = netfx::Config::parse_file(study_config);
        netfx::StudyConfig cfg = netfx::StudyConfig::from_config(raw);
        raw.finish();
        const netfx::MetricsTable table = netfx::run_study(cfg);
        if (!cfg.out_dir.empty()) netfx::write_study_outputs(cfg, table, cfg.out_dir);
        std::cout << "N";
        for (netfx::Variant v : table.variants) std::cout << "\tbias(" << to_string(v) << ")";
        std::cout << "\n";
        for (std::size_t s = 0; s < table.sizes.size(); ++s) {
            std::cout << table.sizes[s];
            for (std::size_t v = 0; v < table.variants.size(); ++v)
                std::cout << "\t" << table.bias[s][v];
            std::cout << "\n";
        }
        if (!cfg.out_dir.empty()) std::cerr << "outputs written to " << cfg.out_dir << "\n";
        return 0;
    }

    if (*panel) {
        if (pn_schema != "builtin:swiss")
            throw netfx::ConfigError("only the builtin:swiss schema ships with this build");
        const netfx::PanelDataset pd =
            netfx::ingest_panel_files(pn_data, pn_adj, netfx::PanelSchema::swiss());
        const netfx::Dag g = netfx::parse_dag_file(pn_graph);
        netfx::EstimateOptions options;
        if (pn_adjust != "auto") options.adjustment = netfx::split_list(pn_adjust);
        const auto reports = netfx::run_observational(
            pd, g,
            {netfx::Variant::naive, netfx::Variant::confounding_adjusted,
             netfx::Variant::interference_adjusted, netfx::Variant::fully_adjusted},
            pn_pi, pn_eta, options);
        std::ostringstream out;
        out << "[\n";
        for (std::size_t k = 0; k < reports.size(); ++k)
            out << netfx::report_to_json(reports[k].second) << (k + 1 < reports.size() ? ",\n" : "\n");
        out << "]\n";
        if (pn_out.empty())
            std::cout << out.str();
        else
            write_text_file(pn_out, out.str());
        std::cerr << "usable rows " << pd.data.n() << ", dropped " << pd.n_dropped << "\n";
        return 0;
    }

    if (*fixture) {
        const netfx::PanelFixture fx = netfx::make_panel_fixture(fx_seed);
        std::filesystem::create_directories(fx_dir);
        write_text_file(fx_dir + "/panel.csv", fx.data_csv);
        write_text_file(fx_dir + "/adjacency.tsv", fx.adjacency_tsv);
        write_text_file(fx_dir + "/graph.dag", netfx::format_dag(fx.graph));
        std::ostringstream truth;
        truth << "{\n  \"alpha0\": [" << fx.alpha0(0) << ", " << fx.alpha0(1) << "],\n"
              << "  \"alpha1\": [" << fx.alpha1(0) << ", " << fx.alpha1(1) << "],\n"
              << "  \"tau_gate\": " << fx.tau_gate << "\n}\n";
        write_text_file(fx_dir + "/truth.json", truth.str());
        std::cerr << "fixture written to " << fx_dir << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const netfx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
