#include "netfx/stats.hpp"

#include <algorithm>
#include <cmath>

#include "netfx/error.hpp"

namespace netfx {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_quantile: p must be in (0,1)");
    // AS 241 (PPND16)
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double lilliefors_statistic(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 4) throw ConfigError("lilliefors_statistic: need at least 4 observations");
    const double m = mean(sample);
    double sd = 0.0;
    for (double x : sample) sd += (x - m) * (x - m);
    sd = std::sqrt(sd / static_cast<double>(n - 1));
    if (sd <= 0.0) return 1.0;
    std::sort(sample.begin(), sample.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf((sample[i] - m) / sd);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

double ks_distance_to_uniform(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    std::sort(values.begin(), values.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std::min(1.0, std::max(0.0, values[i]));
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

double lilliefors_pvalue(const std::vector<double>& sample, int null_reps, Rng& rng) {
    const double observed = lilliefors_statistic(std::vector<double>(sample));
    const std::size_t n = sample.size();
    int at_least = 0;
    std::vector<double> draw(n);
    for (int r = 0; r < null_reps; ++r) {
        for (std::size_t i = 0; i < n; ++i) draw[i] = rng.normal();
        if (lilliefors_statistic(std::vector<double>(draw)) >= observed) ++at_least;
    }
    // add-one smoothing keeps p in (0, 1]
    return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(null_reps) + 1.0);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("ols_slope: length mismatch");
    if (x.size() < 2) throw ConfigError("ols_slope: need at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw ConfigError("ols_slope: degenerate fit, x values all equal");
    return sxy / sxx;
}

} // namespace netfx
