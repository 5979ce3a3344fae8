#include <cmath>

#include "doctest.h"
#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "peellab/rng.hpp"

using namespace peellab;

TEST_CASE("loglog slope recovers exact power laws") {
    std::vector<std::pair<double, double>> pts;
    for (double x = 1.0; x <= 1000.0; x *= 1.7) pts.push_back({x, std::pow(x, -2.0)});
    const TailEstimate est = loglog_slope(pts);
    CHECK(std::fabs(est.slope + 2.0) < 1e-9);
    CHECK(est.ci_high - est.ci_low < 1e-9);

    std::vector<std::pair<double, double>> flat;
    for (double x = 1.0; x <= 1000.0; x *= 1.7) flat.push_back({x, 3.25});
    CHECK(std::fabs(loglog_slope(flat).slope) < 1e-12);
}

TEST_CASE("loglog slope on noisy data") {
    RngStream rng(110, 0);
    std::vector<std::pair<double, double>> pts;
    for (double x = 1.0; x <= 100000.0; x *= 1.1) {
        const double noise = 1.0 + 0.01 * (2.0 * rng.uniform01() - 1.0);
        pts.push_back({x, std::pow(x, 1.5) * noise});
    }
    const TailEstimate est = loglog_slope(pts);
    CHECK(std::fabs(est.slope - 1.5) < 0.02);
    CHECK(est.contains(1.5));
}

TEST_CASE("loglog slope is invariant under rescaling y") {
    std::vector<std::pair<double, double>> a, b;
    RngStream rng(111, 0);
    for (double x = 2.0; x <= 5000.0; x *= 1.3) {
        const double y = std::pow(x, -0.7) * (1.0 + 0.05 * rng.uniform01());
        a.push_back({x, y});
        b.push_back({x, 1234.5 * y});
    }
    CHECK(loglog_slope(a, 0).slope == doctest::Approx(loglog_slope(b, 0).slope).epsilon(1e-12));
}

TEST_CASE("loglog slope input validation") {
    CHECK_THROWS_AS(loglog_slope({{1.0, 1.0}, {2.0, 0.5}}), EmptySample);
    CHECK_THROWS_AS(loglog_slope({{1.0, 1.0}, {1.0, 0.5}, {1.0, 2.0}}), EmptySample);
}

TEST_CASE("hill estimator on a synthetic Pareto(2) sample") {
    RngStream rng(112, 0);
    std::vector<double> sample(1000000);
    for (auto& v : sample) v = 1.0 / std::sqrt(rng.uniform01_open()); // P(X > x) = x^-2
    const double idx = hill(sample, 10000);
    CHECK(std::fabs(idx - 2.0) < 0.05);
}

TEST_CASE("hill estimator rejects light and degenerate tails") {
    RngStream rng(113, 0);
    std::vector<double> expo(200000);
    for (auto& v : expo) v = rng.exponential(1.0);
    // no stable index: the estimate blows up as the order cutoff moves into
    // the tail instead of settling on a plateau
    const double deep = hill(expo, 1000);
    const double wide = hill(expo, 100000);
    CHECK(deep > 2.0 * wide);
    CHECK(deep > 4.0);

    std::vector<double> constant(1000, 7.0);
    CHECK_THROWS_AS(hill(constant, 100), EmptySample);
    CHECK_THROWS_AS(hill(expo, 0), EmptySample);
    CHECK_THROWS_AS(hill(expo, 200000), EmptySample);
}

TEST_CASE("bootstrap: zero width on constants, deterministic under a fixed seed") {
    const std::vector<double> constant(500, 2.5);
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (const double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const auto ci = bootstrap_ci(mean, constant, 200, RngStream(5, 0));
    CHECK(ci.first == 2.5);
    CHECK(ci.second == 2.5);

    RngStream rng(114, 0);
    std::vector<double> data(300);
    for (auto& v : data) v = rng.uniform01();
    const auto a = bootstrap_ci(mean, data, 500, RngStream(9, 1));
    const auto b = bootstrap_ci(mean, data, 500, RngStream(9, 1));
    CHECK(a == b);
    CHECK_THROWS_AS(bootstrap_ci(mean, {}, 200, RngStream(9, 1)), EmptySample);
    CHECK_THROWS_AS(bootstrap_ci(mean, data, 50, RngStream(9, 1)), EmptySample);
}

TEST_CASE("bootstrap coverage on normal data is near 95%") {
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (const double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    RngStream rng(115, 0);
    int covered = 0;
    const int datasets = 400;
    for (int d = 0; d < datasets; ++d) {
        std::vector<double> data(100);
        for (auto& v : data) {
            // Box-Muller
            const double u1 = rng.uniform01_open(), u2 = rng.uniform01();
            v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        const auto ci = bootstrap_ci(mean, data, 300, RngStream(200, static_cast<std::uint64_t>(d)));
        if (ci.first <= 0.0 && 0.0 <= ci.second) ++covered;
    }
    const double coverage = static_cast<double>(covered) / datasets;
    CHECK(coverage > 0.89);
    CHECK(coverage <= 1.0);
}

TEST_CASE("two-sample KS separates distinct laws and accepts equal ones") {
    RngStream rng(116, 0);
    std::vector<double> a(20000), b(20000), c(20000);
    for (auto& v : a) v = rng.uniform01();
    for (auto& v : b) v = rng.uniform01();
    for (auto& v : c) v = rng.uniform01() + 0.05;
    CHECK(ks_two_sample(a, b).p_value > 0.001);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("chi-square helper matches a fair-die expectation") {
    // chosen counts with a known statistic
    const std::vector<std::int64_t> obs = {95, 105, 100, 98, 102, 100};
    const std::vector<double> probs(6, 1.0 / 6.0);
    const ChiSquare c = chi_square_gof(obs, probs);
    CHECK(c.df == 5);
    CHECK(c.p_value > 0.9);
}

TEST_CASE("median and quantiles") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
    CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK_THROWS_AS(median({}), EmptySample);
}
