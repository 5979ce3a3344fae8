#include <cmath>

#include "doctest.h"
#include "peellab/eden.hpp"
#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "test_support.hpp"

using namespace peellab;
using peellab::testing::test_law;
using peellab::testing::test_nu;

TEST_CASE("T_1 is exponential of rate 2 P_0 = 2") {
    std::vector<double> t1;
    PeelEngine engine(test_law(), test_nu());
    for (int r = 0; r < 100000; ++r) {
        RngStream rng(80, static_cast<std::uint64_t>(r));
        const ClockedTrajectory traj = eden_run(engine, 1, 1, rng);
        t1.push_back(traj.rows.back().T);
    }
    const double ks = ks_statistic(t1, [](double x) { return 1.0 - std::exp(-2.0 * x); });
    CHECK(kolmogorov_q(std::sqrt(100000.0) * ks) > 0.001);
}

TEST_CASE("the clock is strictly increasing") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(81, 0);
    const ClockedTrajectory traj = eden_run(engine, 50000, 1, rng);
    for (std::size_t i = 1; i < traj.rows.size(); ++i)
        CHECK(traj.rows[i].T > traj.rows[i - 1].T);
}

TEST_CASE("hull_at_time boundary semantics") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(82, 0);
    const ClockedTrajectory traj = eden_run(engine, 2000, 1, rng);

    // t = 0 gives the initial state
    const HullSnapshot at0 = hull_at_time(traj, 0.0);
    CHECK(at0.n == 0);
    CHECK(at0.half_perimeter == 1);

    // just past T_n the hull is the step-n state
    for (const std::size_t i : {std::size_t{1}, std::size_t{100}, std::size_t{1999}}) {
        const double t = traj.rows[i].T;
        const double t_next = traj.rows[i + 1].T;
        const HullSnapshot snap = hull_at_time(traj, t + (t_next - t) * 0.5);
        CHECK(snap.n == traj.rows[i].n);
        CHECK(snap.half_perimeter == traj.rows[i].P);
    }

    // U_t is non-decreasing in t
    std::int64_t prev = -1;
    const double t_end = traj.rows.back().T;
    for (int s = 0; s <= 50; ++s) {
        const HullSnapshot snap = hull_at_time(traj, t_end * s / 50.0);
        CHECK(snap.n >= prev);
        prev = snap.n;
    }

    CHECK_THROWS_AS(hull_at_time(traj, t_end + 1.0), InvalidState);
}

TEST_CASE("T_n / log n approaches 1/(pi^2 p_q) (smoke scale)") {
    const double target = 1.0 / (M_PI * M_PI * test_law().p_q());
    EngineOptions opts;
    opts.track_volume = false;
    PeelEngine engine(test_law(), test_nu(), opts);
    const std::int64_t n = 200000;
    double mean = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(83, static_cast<std::uint64_t>(r));
        const ClockedTrajectory traj = eden_run(engine, n, n, rng);
        mean += traj.rows.back().T / std::log(static_cast<double>(n));
    }
    mean /= reps;
    CHECK(std::fabs(mean - target) / target < 0.35);
}
