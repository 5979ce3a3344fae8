#include <cmath>
#include <map>

#include "doctest.h"
#include "fill_oracle.hpp"
#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "peellab/peel_engine.hpp"
#include "test_support.hpp"

using namespace peellab;
using peellab::testing::FillOracle;
using peellab::testing::test_law;
using peellab::testing::test_nu;

TEST_CASE("apply: NewFace and Glue bookkeeping") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(60, 0);

    ExplorationState st = PeelEngine::initial_state(PeelMode::plane);
    st.P = 5;
    engine.apply(st, {PeelEvent::Kind::NewFace, 3}, rng);
    CHECK(st.P == 7);
    CHECK(st.F == 1);
    CHECK(st.V == 0);
    CHECK(st.n == 1);

    st.P = 5;
    const std::uint64_t v_before = st.V;
    engine.apply(st, {PeelEvent::Kind::GlueLeft, 0}, rng);
    CHECK(st.P == 4);
    CHECK(st.V == v_before); // hole of half-perimeter 0 contributes nothing
}

TEST_CASE("fill_hole base cases and the structural invariant") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(61, 0);
    const FillResult zero = engine.fill_hole(0, rng);
    CHECK(zero.vertices == 1);
    CHECK(zero.faces == 0);
    CHECK(zero.peel_steps == 0);

    // vertices = splits + 1 and splits = peel_steps - faces, per fill
    for (int i = 0; i < 20000; ++i) {
        const FillResult f = engine.fill_hole(1 + (i % 5), rng);
        CHECK(f.vertices == (f.peel_steps - f.faces) + 1);
    }
}

TEST_CASE("fill(1) hits the edge map with the exact split probability") {
    const StepLaw& law = test_law();
    PeelEngine engine(law, test_nu());
    RngStream rng(62, 0);
    // an immediate Split(0,0) gives the edge map: exactly 2 vertices, 0 faces
    const double p_edge = law.kernel_finite_split(1, 0);
    std::int64_t hits = 0;
    const std::int64_t n = 200000;
    for (std::int64_t i = 0; i < n; ++i) {
        const FillResult f = engine.fill_hole(1, rng);
        if (f.peel_steps == 1) {
            CHECK(f.vertices == 2);
            CHECK(f.faces == 0);
            ++hits;
        }
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(n);
    CHECK(freq == doctest::Approx(p_edge).epsilon(0.05));
}

TEST_CASE("fill(1) distribution matches the enumeration oracle (reduced run)") {
    const StepLaw& law = test_law();
    const FillOracle oracle(law, 1, 6, 66);
    PeelEngine engine(law, test_nu());
    RngStream rng(63, 0);
    const std::int64_t n = 100000;
    std::map<std::pair<std::int64_t, int>, std::int64_t> counts;
    std::int64_t in_grid = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const FillResult f = engine.fill_hole(1, rng);
        if (f.faces <= 6 && f.vertices <= 66) {
            ++counts[{static_cast<std::int64_t>(f.vertices), static_cast<int>(f.faces)}];
            ++in_grid;
        }
    }
    double tv = 0.0;
    for (int f = 0; f <= 6; ++f) {
        for (std::int64_t v = 0; v <= 66; ++v) {
            const double p = oracle.probability(v, f);
            const auto it = counts.find({v, f});
            const double emp = it == counts.end()
                                   ? 0.0
                                   : static_cast<double>(it->second) / static_cast<double>(n);
            tv += std::fabs(emp - p);
        }
    }
    tv += std::fabs(static_cast<double>(n - in_grid) / static_cast<double>(n) -
                    (1.0 - oracle.grid_mass()));
    CHECK(tv / 2.0 < 0.03);
}

TEST_CASE("plane-mode runs keep P >= 1 and grow") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(64, 0);
    Trajectory traj = engine.run(PeelMode::plane, 20000, 100, rng);
    CHECK(traj.rows.front().P == 1);
    for (const auto& row : traj.rows) CHECK(row.P >= 1);
    CHECK(traj.rows.back().n == 20000);
    // V and F are non-decreasing along the record
    for (std::size_t i = 1; i < traj.rows.size(); ++i) {
        CHECK(traj.rows[i].V >= traj.rows[i - 1].V);
        CHECK(traj.rows[i].F >= traj.rows[i - 1].F);
    }
}

TEST_CASE("growth exponents head towards (1, 3/2) (smoke scale)") {
    std::vector<double> lp, lv;
    for (int r = 0; r < 30; ++r) {
        PeelEngine engine(test_law(), test_nu());
        RngStream rng(65, static_cast<std::uint64_t>(r));
        Trajectory traj = engine.run(PeelMode::plane, 30000, 30000, rng);
        const auto& last = traj.rows.back();
        lp.push_back(std::log(static_cast<double>(last.P)) / std::log(30000.0));
        if (last.V > 0) lv.push_back(std::log(static_cast<double>(last.V)) / std::log(30000.0));
    }
    CHECK(std::fabs(median(lp) - 1.0) < 0.2);
    CHECK(std::fabs(median(lv) - 1.5) < 0.35);
}

TEST_CASE("half-plane mode: perimeter variation is the unconditioned walk") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(66, 0);
    ExplorationState st = PeelEngine::initial_state(PeelMode::half_plane);
    CHECK(st.P == 0);
    bool went_negative = false;
    for (int i = 0; i < 20000; ++i) {
        engine.step(st, rng);
        if (st.P < 0) went_negative = true;
    }
    CHECK(went_negative); // algebraic variation may leave N
}

TEST_CASE("work budget guards runaway fills") {
    EngineOptions opts;
    opts.fill_budget = 3;
    PeelEngine engine(test_law(), test_nu(), opts);
    RngStream rng(67, 0);
    bool tripped = false;
    for (int i = 0; i < 3000 && !tripped; ++i) {
        try {
            engine.fill_hole(40, rng);
        } catch (const WorkBudgetExceeded&) {
            tripped = true;
        }
    }
    CHECK(tripped);
}

TEST_CASE("run validates its arguments") {
    PeelEngine engine(test_law(), test_nu());
    RngStream rng(68, 0);
    CHECK_THROWS_AS(engine.run(PeelMode::plane, 0, 1, rng), InvalidState);
    CHECK_THROWS_AS(engine.fill_hole(-1, rng), InvalidPerimeter);
}
