#pragma once

#include <cstdint>
#include <vector>

#include "netfx/rng.hpp"

namespace netfx {

double normal_cdf(double x);

// Inverse standard normal CDF (Wichura's AS 241), |error| < 1e-13.
double normal_quantile(double p);

double mean(const std::vector<double>& v);

// population variance (divides by n), matching the RMSE^2 = bias^2 + var identity
double variance(const std::vector<double>& v);

// Two-sided Kolmogorov-Smirnov distance of a sample to the standard normal
// after standardizing by the sample's own mean and sd (Lilliefors statistic).
double lilliefors_statistic(std::vector<double> sample);

// sup_t |ecdf(t) - t| for values in [0, 1]
double ks_distance_to_uniform(std::vector<double> values);

// Lilliefors-style p-value: the null distribution of the statistic is tabled
// by Monte Carlo with `null_reps` normal samples of the same size.
double lilliefors_pvalue(const std::vector<double>& sample, int null_reps, Rng& rng);

// least-squares slope of y on x
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace netfx
