#include "peellab/estimators.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "peellab/errors.hpp"

namespace peellab {

bool slope_of_logs(const std::vector<std::pair<double, double>>& pts, double* slope,
                   double* residual_rms) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(pts.size());
    for (const auto& [x, y] : pts) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::fabs(denom) > 1e-12 * (sxx * n + 1.0))) return false;
    const double b = (n * sxy - sx * sy) / denom;
    if (slope) *slope = b;
    if (residual_rms) {
        const double a = (sy - b * sx) / n;
        double ss = 0;
        for (const auto& [x, y] : pts) {
            const double r = std::log(y) - (a + b * std::log(x));
            ss += r * r;
        }
        *residual_rms = std::sqrt(ss / n);
    }
    return true;
}

TailEstimate loglog_slope(const std::vector<std::pair<double, double>>& points,
                          int bootstrap_reps, RngStream rng) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(points.size());
    for (const auto& [x, y] : points)
        if (x > 0.0 && y > 0.0) pts.push_back({x, y});
    if (pts.size() < 3) throw EmptySample("loglog_slope needs >= 3 positive points");

    TailEstimate est;
    est.n_grid.reserve(pts.size());
    for (const auto& [x, y] : pts) est.n_grid.push_back(x);
    if (!slope_of_logs(pts, &est.slope, &est.residual_rms))
        throw EmptySample("loglog_slope: degenerate abscissae");

    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(bootstrap_reps));
    std::vector<std::pair<double, double>> resample(pts.size());
    for (int rep = 0; rep < bootstrap_reps; ++rep) {
        for (auto& q : resample) q = pts[rng.uniform_below(pts.size())];
        double s;
        if (slope_of_logs(resample, &s, nullptr)) slopes.push_back(s);
    }
    if (slopes.empty()) {
        est.ci_low = est.ci_high = est.slope;
        return est;
    }
    std::sort(slopes.begin(), slopes.end());
    const auto lo = static_cast<std::size_t>(0.025 * static_cast<double>(slopes.size() - 1));
    const auto hi = static_cast<std::size_t>(0.975 * static_cast<double>(slopes.size() - 1));
    est.ci_low = std::min(slopes[lo], est.slope);
    est.ci_high = std::max(slopes[hi], est.slope);
    return est;
}

double hill(std::vector<double> samples, std::int64_t k_order) {
    if (k_order < 1 || k_order >= static_cast<std::int64_t>(samples.size()))
        throw EmptySample("hill: k_order must be in [1, n)");
    std::sort(samples.begin(), samples.end(), std::greater<>());
    const double pivot = samples[static_cast<std::size_t>(k_order)];
    if (!(pivot > 0.0)) throw EmptySample("hill: non-positive order statistic");
    double acc = 0.0;
    for (std::int64_t i = 0; i < k_order; ++i)
        acc += std::log(samples[static_cast<std::size_t>(i)] / pivot);
    if (!(acc > 0.0)) throw EmptySample("hill: degenerate sample");
    return static_cast<double>(k_order) / acc;
}

std::pair<double, double> bootstrap_ci(
    const std::function<double(const std::vector<double>&)>& statistic,
    const std::vector<double>& samples, int reps, RngStream rng, double level) {
    if (samples.empty()) throw EmptySample("bootstrap_ci: empty sample");
    if (reps < 100) throw EmptySample("bootstrap_ci: reps must be >= 100");
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(reps));
    std::vector<double> resample(samples.size());
    for (int rep = 0; rep < reps; ++rep) {
        for (auto& v : resample) v = samples[rng.uniform_below(samples.size())];
        stats.push_back(statistic(resample));
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    const auto lo = static_cast<std::size_t>(tail * static_cast<double>(stats.size() - 1));
    const auto hi = static_cast<std::size_t>((1.0 - tail) * static_cast<double>(stats.size() - 1));
    return {stats[lo], stats[hi]};
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw EmptySample("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return d;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double q = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 101; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        q += 2.0 * sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(q, 0.0, 1.0);
}

KsTwoSample ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptySample("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsTwoSample out;
    out.statistic = d;
    const double ne = std::sqrt(na * nb / (na + nb));
    out.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    return out;
}

ChiSquare chi_square_gof(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw EmptySample("chi_square_gof: mismatched inputs");
    std::int64_t total = 0;
    for (const std::int64_t c : observed) total += c;
    ChiSquare out;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expect = expected_probs[i] * static_cast<double>(total);
        if (!(expect > 0.0)) throw EmptySample("chi_square_gof: zero expected cell");
        const double diff = static_cast<double>(observed[i]) - expect;
        out.statistic += diff * diff / expect;
    }
    out.df = static_cast<std::int64_t>(observed.size()) - 1;
    boost::math::chi_squared dist(static_cast<double>(out.df));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw EmptySample("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

} // namespace peellab
