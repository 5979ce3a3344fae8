#include <cmath>

#include "doctest.h"
#include "peellab/errors.hpp"
#include "peellab/walk_lab.hpp"
#include "test_support.hpp"

using namespace peellab;
using peellab::testing::test_law;
using peellab::testing::test_nu;

namespace {

std::vector<std::int64_t> default_grid(std::int64_t n_max) {
    std::vector<std::int64_t> grid;
    for (std::int64_t n = 2; n <= n_max; n = std::max(n + 1, (n * 3) / 2)) grid.push_back(n);
    return grid;
}

} // namespace

TEST_CASE("make_walk_law: symmetric with no atom gives b = 0") {
    const CauchyWalkLaw law = make_walk_law(0.5, 0.5, 0.0);
    CHECK(law.b() == 0.0);
    CHECK(law.pmf(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(law.pmf(-1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("make_walk_law: the atom reaches the target b and rejects the unreachable") {
    const CauchyWalkLaw law = make_walk_law(0.25, 0.25, M_PI * 0.25);
    CHECK(law.b() == doctest::Approx(M_PI * 0.25).epsilon(1e-6));
    CHECK_THROWS_AS(make_walk_law(0.5, 0.5, 1.0), UnreachableB);
    CHECK_THROWS_AS(make_walk_law(0.25, 0.25, 64.0), UnreachableB);
    CHECK_THROWS_AS(make_walk_law(-0.1, 0.5, 0.0), UnreachableB);
}

TEST_CASE("constructed tails: k P(W > k) approaches c_plus") {
    const CauchyWalkLaw law = make_walk_law(0.3, 0.2, 0.0);
    // analytic tail: P(W > k) = c+/(k+1) for k past the atom
    for (const std::int64_t k : {100, 100000}) {
        double tail = 0.0;
        // sum the pmf of the rational part beyond k: telescoping
        tail = 0.3 / static_cast<double>(k + 1);
        CHECK(std::fabs(static_cast<double>(k) * tail - 0.3) / 0.3 < 0.02);
    }
}

TEST_CASE("b evaluated at growing horizons is stable to three digits") {
    const CauchyWalkLaw law = make_walk_law(0.25, 0.25, 1.0 / 3.0);
    const double b7 = law.b_at_horizon(1e7);
    const double b8 = law.b_at_horizon(1e8);
    CHECK(std::fabs(b7 - b8) < 1e-3 * std::fabs(b8));
}

TEST_CASE("rho prediction: exact anchors and monotonicity") {
    CHECK(rho_prediction(0.0, 0.25) == 0.5);
    CHECK(rho_prediction(M_PI * 0.25, 0.25) == doctest::Approx(0.75).epsilon(1e-14));
    double prev = 0.0;
    for (double b = -3.0; b <= 3.0; b += 0.25) {
        const double r = rho_prediction(b, 0.25);
        CHECK(r > 0.0);
        CHECK(r < 1.0);
        if (b > -3.0) CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("trig identity: the two lambda(1/2) code paths agree to 1e-12") {
    const double pq = test_law().p_q();
    const double via_rho = rho_prediction(-0.5, pq);
    const double direct = 0.5 - std::atan(1.0 / (2.0 * M_PI * pq)) / M_PI;
    const double via_perco = std::atan(2.0 * M_PI * pq) / M_PI;
    CHECK(std::fabs(via_rho - direct) < 1e-12);
    CHECK(std::fabs(direct - via_perco) < 1e-12);
}

TEST_CASE("tau tails: measured exponents across the tilt (smoke scale)") {
    const auto grid = default_grid(30000);

    RngStream rng(100, 0);
    const auto sym = tau_tail(make_walk_law(0.25, 0.25, 0.0), grid, 20000, rng, 100);
    CHECK(sym.rho_predicted == 0.5);
    CHECK(std::fabs(-sym.slope.slope - 0.5) < 0.08);
    CHECK(sym.slope.ci_low <= sym.slope.slope);
    CHECK(sym.slope.ci_high >= sym.slope.slope);

    // a positive tilt makes staying positive easier: the survival exponent
    // drops to 1 - P(C > -b) = 1/2 - arctan(b/(pi c+))/pi, here 1/4 — and
    // symmetrically 3/4 for the negative tilt
    const auto tilt_up = tau_tail(make_walk_law(0.25, 0.25, M_PI * 0.25), grid, 20000, rng, 0);
    CHECK(std::fabs(-tilt_up.slope.slope - 0.25) < 0.07);
    const auto tilt_down =
        tau_tail(make_walk_law(0.25, 0.25, -M_PI * 0.25), grid, 60000, rng, 0);
    CHECK(std::fabs(-tilt_down.slope.slope - 0.75) < 0.12);

    const auto asym = tau_tail(make_walk_law(0.15, 0.35, 0.0), grid, 20000, rng, 0);
    CHECK(std::isnan(asym.rho_predicted));
    CHECK(std::fabs(-asym.slope.slope - 1.0) < 0.25);
}

TEST_CASE("tau_tail validates its grid") {
    RngStream rng(101, 0);
    const CauchyWalkLaw law = make_walk_law(0.25, 0.25, 0.0);
    CHECK_THROWS_AS(tau_tail(law, {}, 100, rng), EmptySample);
    CHECK_THROWS_AS(tau_tail(law, {1, 2, 3}, 100, rng), EmptySample);
    CHECK_THROWS_AS(tau_tail(law, {10, 10}, 100, rng), EmptySample);
}

TEST_CASE("increasing walk deviation: trend, degenerate inputs") {
    RngStream rng(102, 0);
    // huge delta: certain concentration
    CHECK(increasing_walk_deviation(0.5, 100.0, 1000, 200, rng) == 0.0);
    CHECK_THROWS_AS(increasing_walk_deviation(0.5, 0.2, 1, 100, rng), EmptySample);
    CHECK_THROWS_AS(increasing_walk_deviation(0.0, 0.2, 100, 100, rng), EmptySample);

    // estimate * log n stays bounded as n grows (smoke: two decades)
    const double p3 = increasing_walk_deviation(0.5, 0.25, 1000, 4000, rng);
    const double p5 = increasing_walk_deviation(0.5, 0.25, 100000, 400, rng);
    CHECK(p3 * std::log(1000.0) < 3.0);
    CHECK(p5 * std::log(100000.0) < 3.0);
}

TEST_CASE("cauchy gof on the calibrated law (smoke scale)") {
    RngStream rng(103, 0);
    const double ks = cauchy_gof(test_law(), test_nu(), 1000, 4000, rng);
    CHECK(ks < 0.05);
}
