#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "peellab/rng.hpp"

namespace peellab {

struct TailEstimate {
    double slope = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> n_grid;
    double residual_rms = 0.0; // fit diagnostics

    bool contains(double value) const { return ci_low <= value && value <= ci_high; }
};

// Least-squares slope of log y against log x with a percentile-bootstrap CI
// over the points. Points with non-positive coordinates are rejected.
TailEstimate loglog_slope(const std::vector<std::pair<double, double>>& points,
                          int bootstrap_reps = 1000, RngStream rng = RngStream(0x10675ULL, 0));

// bare OLS slope over (log x, log y); false on a degenerate design
bool slope_of_logs(const std::vector<std::pair<double, double>>& pts, double* slope,
                   double* residual_rms);

// Hill estimator of the power-law tail index from the top k_order order
// statistics.
double hill(std::vector<double> samples, std::int64_t k_order);

// Percentile bootstrap interval for an arbitrary statistic.
std::pair<double, double> bootstrap_ci(
    const std::function<double(const std::vector<double>&)>& statistic,
    const std::vector<double>& samples, int reps, RngStream rng, double level = 0.95);

// sup_x |F_emp(x) - cdf(x)|; samples need not be sorted.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct KsTwoSample {
    double statistic = 0.0;
    double p_value = 0.0;
};
KsTwoSample ks_two_sample(std::vector<double> a, std::vector<double> b);

// asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}
double kolmogorov_q(double lambda);

struct ChiSquare {
    double statistic = 0.0;
    std::int64_t df = 0;
    double p_value = 0.0;
};
// observed counts against expected probabilities (cells with tiny expectation
// should be pre-merged by the caller)
ChiSquare chi_square_gof(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_probs);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

} // namespace peellab
