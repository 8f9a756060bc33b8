#include "netfx/sem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "netfx/csv.hpp"
#include "netfx/error.hpp"

namespace netfx {

double NoiseSpec::draw(Rng& rng) const {
    switch (kind) {
        case Kind::gaussian: return std::sqrt(variance) * rng.normal();
        case Kind::uniform: {
            const double half_width = std::sqrt(3.0 * variance);
            return rng.uniform(-half_width, half_width);
        }
        case Kind::none: return 0.0;
    }
    return 0.0;
}

std::string NoiseSpec::str() const {
    switch (kind) {
        case Kind::gaussian: return "gaussian:" + std::to_string(variance);
        case Kind::uniform: return "uniform:" + std::to_string(variance);
        case Kind::none: return "none";
    }
    return "none";
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
    NoiseSpec spec;
    if (text == "none") {
        spec.kind = Kind::none;
        spec.variance = 0.0;
        return spec;
    }
    const auto colon = text.find(':');
    const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    spec.variance = colon == std::string::npos ? 1.0 : std::stod(text.substr(colon + 1));
    if (spec.variance < 0.0) throw ConfigError("noise variance must be nonnegative");
    if (kind == "gaussian")
        spec.kind = Kind::gaussian;
    else if (kind == "uniform")
        spec.kind = Kind::uniform;
    else
        throw ConfigError("unknown noise kind '" + text + "'");
    return spec;
}

void SemConfig::validate(int p_features) const {
    if (alpha0.size() != alpha1.size()) throw ConfigError("alpha0 and alpha1 must match in length");
    if (static_cast<int>(alpha0.size()) != p_features + 1)
        throw ConfigError("alpha vectors have length " + std::to_string(alpha0.size()) +
                          ", expected P+1 = " + std::to_string(p_features + 1));
    const int d = dc();
    if (c_intercepts.size() != d || treat_coef.size() != d ||
        static_cast<int>(c_noise.size()) != d)
        throw ConfigError("covariate model pieces must all have length Dc");
    for (const auto& [dst, src, coef] : c_links) {
        (void)coef;
        if (dst < 0 || dst >= d || src < 0 || src >= d || src >= dst)
            throw ConfigError("covariate link must point from an earlier to a later covariate");
    }
}

SemConfig SemConfig::example_study(const Eigen::VectorXd& alpha0, const Eigen::VectorXd& alpha1) {
    SemConfig cfg;
    cfg.alpha0 = alpha0;
    cfg.alpha1 = alpha1;
    cfg.gamma = Eigen::Vector3d(1.5, 0.0, 0.0);
    cfg.c_intercepts = Eigen::Vector3d(-2.0, 0.0, 0.5);
    cfg.c_links = {{1, 0, 2.0}}; // C2 <- 2 C1
    cfg.treat_coef = Eigen::Vector3d(0.0, 1.0, 5.0);
    cfg.treat_intercept = 0.0;
    cfg.c_noise = {NoiseSpec{NoiseSpec::Kind::gaussian, 1.0},
                   NoiseSpec{NoiseSpec::Kind::gaussian, 1.0},
                   NoiseSpec{NoiseSpec::Kind::gaussian, 1.0}};
    cfg.y_noise = NoiseSpec{NoiseSpec::Kind::uniform, 1.0};
    return cfg;
}

SemConfig SemConfig::example_study(int p_features) {
    Eigen::VectorXd a0(p_features + 1), a1(p_features + 1);
    if (p_features == 1) {
        a0 << 2.0, 1.0;
        a1 << 0.4, 1.1;
    } else if (p_features == 2) {
        a0 << 2.0, 1.0, 0.5;
        a1 << 0.4, 1.1, 0.5;
    } else {
        throw ConfigError("study defaults cover P = 1 or 2 features");
    }
    return example_study(a0, a1);
}

void Dataset::validate() const {
    const int rows = n();
    if (C.rows() != rows || W.size() != rows || X.rows() != rows || O.rows() != rows)
        throw DataError("dataset column lengths disagree");
    if (X.cols() != O.cols()) throw DataError("X and O must have the same width");
    if (static_cast<int>(c_names.size()) != C.cols())
        throw DataError("covariate names do not match the covariate matrix");
    for (int i = 0; i < rows; ++i) {
        if (W(i) != 0.0 && W(i) != 1.0)
            throw DataError("treatment must be binary; unit " + std::to_string(i + 1) +
                            " has W = " + std::to_string(W(i)));
        for (int k = 0; k < X.cols(); ++k)
            if (std::abs(O(i, k) - W(i) * X(i, k)) > 1e-9)
                throw DataError("O must equal W * X elementwise; violated at unit " +
                                std::to_string(i + 1));
    }
}

std::optional<int> Dataset::covariate_index(const std::string& name) const {
    for (std::size_t k = 0; k < c_names.size(); ++k)
        if (c_names[k] == name) return static_cast<int>(k);
    return std::nullopt;
}

Dataset simulate(const SemConfig& cfg, const std::shared_ptr<const InteractionNetwork>& net,
                 const FeatureComputer& fc, Rng& rng) {
    cfg.validate(fc.p());
    const int n = fc.n_units();
    const int dc = cfg.dc();
    const int p = fc.p();

    Dataset ds;
    ds.C.resize(n, dc);
    ds.c_names.resize(static_cast<std::size_t>(dc));
    for (int k = 0; k < dc; ++k) ds.c_names[static_cast<std::size_t>(k)] = "C" + std::to_string(k + 1);

    // covariates in declaration order (links always point forward)
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < dc; ++k) {
            double value = cfg.c_intercepts(k);
            for (const auto& [dst, src, coef] : cfg.c_links)
                if (dst == k) value += coef * ds.C(i, src);
            ds.C(i, k) = value + cfg.c_noise[static_cast<std::size_t>(k)].draw(rng);
        }
    }

    ds.W.resize(n);
    std::vector<std::uint8_t> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double z = cfg.treat_intercept + cfg.treat_coef.dot(ds.C.row(i));
        const double prob = 1.0 / (1.0 + std::exp(-z));
        w[static_cast<std::size_t>(i)] = rng.bernoulli(prob) ? 1 : 0;
        ds.W(i) = static_cast<double>(w[static_cast<std::size_t>(i)]);
    }

    ds.X = fc.compute(w);
    ds.O = ds.X.array().colwise() * ds.W.array();

    ds.Y.resize(n);
    for (int i = 0; i < n; ++i) {
        double y = cfg.alpha0(0) + cfg.alpha1(0) * ds.W(i) + cfg.gamma.dot(ds.C.row(i));
        for (int k = 0; k < p; ++k)
            y += cfg.alpha0(k + 1) * ds.X(i, k) + cfg.alpha1(k + 1) * ds.O(i, k);
        ds.Y(i) = y + cfg.y_noise.draw(rng);
    }

    ds.network = net;
    ds.feature_spec = fc.spec();
    return ds;
}

Dataset simulate(const SemConfig& cfg, const InteractionNetwork& net, const FeatureSpec& spec,
                 Rng& rng) {
    auto shared = std::make_shared<InteractionNetwork>(net);
    return simulate(cfg, shared, FeatureComputer(*shared, spec), rng);
}

double true_tau(const SemConfig& cfg, const Weights& weights) {
    if (weights.omega0.size() != cfg.alpha0.size())
        throw ConfigError("weight length " + std::to_string(weights.omega0.size()) +
                          " does not match alpha length " + std::to_string(cfg.alpha0.size()));
    return weights.omega0.dot(cfg.alpha0) + weights.omega1.dot(cfg.alpha0 + cfg.alpha1);
}

McTau mc_tau_oracle(const SemConfig& cfg, const InteractionNetwork& net, const FeatureSpec& spec,
                    double pi, double eta, int reps, Rng& rng) {
    if (reps < 1) throw ConfigError("mc_tau_oracle needs reps >= 1");
    const FeatureComputer fc(net, spec);
    cfg.validate(fc.p());
    const int n = net.n_units();
    const int p = fc.p();

    auto mean_outcome = [&](const std::vector<std::uint8_t>& w, const Eigen::MatrixXd& c,
                            const Eigen::VectorXd& eps_y) {
        const Eigen::MatrixXd x = fc.compute(w);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double wi = static_cast<double>(w[static_cast<std::size_t>(i)]);
            double y = cfg.alpha0(0) + cfg.alpha1(0) * wi + cfg.gamma.dot(c.row(i)) + eps_y(i);
            for (int k = 0; k < p; ++k)
                y += (cfg.alpha0(k + 1) + cfg.alpha1(k + 1) * wi) * x(i, k);
            total += y;
        }
        return total / static_cast<double>(n);
    };

    double sum = 0.0;
    double sum_sq = 0.0;
    Eigen::MatrixXd c(n, cfg.dc());
    Eigen::VectorXd eps_y(n);
    std::vector<std::uint8_t> w_pi(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> w_eta(static_cast<std::size_t>(n));
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < cfg.dc(); ++k) {
                double value = cfg.c_intercepts(k);
                for (const auto& [dst, src, coef] : cfg.c_links)
                    if (dst == k) value += coef * c(i, src);
                c(i, k) = value + cfg.c_noise[static_cast<std::size_t>(k)].draw(rng);
            }
            eps_y(i) = cfg.y_noise.draw(rng);
        }
        for (int i = 0; i < n; ++i) w_pi[static_cast<std::size_t>(i)] = rng.bernoulli(pi) ? 1 : 0;
        for (int i = 0; i < n; ++i) w_eta[static_cast<std::size_t>(i)] = rng.bernoulli(eta) ? 1 : 0;
        const double contrast = mean_outcome(w_pi, c, eps_y) - mean_outcome(w_eta, c, eps_y);
        sum += contrast;
        sum_sq += contrast * contrast;
    }
    McTau out;
    out.reps = reps;
    out.estimate = sum / reps;
    const double var = std::max(0.0, sum_sq / reps - out.estimate * out.estimate);
    out.std_error = std::sqrt(var / reps);
    return out;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    std::vector<std::string> header{"unit"};
    for (const auto& name : ds.c_names) header.push_back(name);
    header.push_back("W");
    for (int k = 0; k < ds.p(); ++k) header.push_back("X" + std::to_string(k + 1));
    for (int k = 0; k < ds.p(); ++k) header.push_back("O" + std::to_string(k + 1));
    header.push_back("Y");
    write_csv_header(out, header);
    for (int i = 0; i < ds.n(); ++i) {
        out << (i + 1);
        for (int k = 0; k < ds.dc(); ++k) out << "," << format_double(ds.C(i, k));
        out << "," << format_double(ds.W(i));
        for (int k = 0; k < ds.p(); ++k) out << "," << format_double(ds.X(i, k));
        for (int k = 0; k < ds.p(); ++k) out << "," << format_double(ds.O(i, k));
        out << "," << format_double(ds.Y(i)) << "\n";
    }
}

Dataset read_dataset_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    const int rows = static_cast<int>(table.rows.size());
    if (rows == 0) throw DataError("dataset CSV has no rows");

    std::vector<int> c_cols, x_cols, o_cols;
    int w_col = -1, y_col = -1;
    std::vector<std::string> c_names;
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        const std::string& name = table.columns[k];
        if (name == "unit") continue;
        if (name == "W")
            w_col = static_cast<int>(k);
        else if (name == "Y")
            y_col = static_cast<int>(k);
        else if (name.size() > 1 && name[0] == 'X' && std::isdigit(static_cast<unsigned char>(name[1])))
            x_cols.push_back(static_cast<int>(k));
        else if (name.size() > 1 && name[0] == 'O' && std::isdigit(static_cast<unsigned char>(name[1])))
            o_cols.push_back(static_cast<int>(k));
        else {
            c_cols.push_back(static_cast<int>(k));
            c_names.push_back(name);
        }
    }
    if (w_col < 0 || y_col < 0) throw DataError("dataset CSV must contain W and Y columns");
    if (x_cols.size() != o_cols.size())
        throw DataError("dataset CSV must contain matching X and O columns");

    Dataset ds;
    ds.c_names = std::move(c_names);
    ds.C.resize(rows, static_cast<int>(c_cols.size()));
    ds.X.resize(rows, static_cast<int>(x_cols.size()));
    ds.O.resize(rows, static_cast<int>(o_cols.size()));
    ds.W.resize(rows);
    ds.Y.resize(rows);
    for (int i = 0; i < rows; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < c_cols.size(); ++k)
            ds.C(i, static_cast<int>(k)) = csv_double(row, c_cols[k]);
        for (std::size_t k = 0; k < x_cols.size(); ++k)
            ds.X(i, static_cast<int>(k)) = csv_double(row, x_cols[k]);
        for (std::size_t k = 0; k < o_cols.size(); ++k)
            ds.O(i, static_cast<int>(k)) = csv_double(row, o_cols[k]);
        ds.W(i) = csv_double(row, w_col);
        ds.Y(i) = csv_double(row, y_col);
    }
    ds.validate();
    return ds;
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file '" + path + "'");
    return read_dataset_csv(in);
}

} // namespace netfx
