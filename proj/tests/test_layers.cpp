#include <cmath>

#include "doctest.h"
#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "peellab/layers.hpp"
#include "test_support.hpp"

using namespace peellab;
using peellab::testing::test_law;
using peellab::testing::test_nu;

TEST_CASE("layer rule: the D = 1 edge always completes the layer") {
    for (const PeelEvent ev : {PeelEvent{PeelEvent::Kind::NewFace, 4},
                               PeelEvent{PeelEvent::Kind::GlueLeft, 0},
                               PeelEvent{PeelEvent::Kind::GlueRight, 2}}) {
        const LayerUpdate up = apply_layer_rule(1, ev, 7);
        CHECK(up.delta_H == 1);
        CHECK(up.D == 14);
    }
}

TEST_CASE("layer rule: per-event updates") {
    // NewFace at D=5 decrements D, height unchanged
    LayerUpdate up = apply_layer_rule(5, {PeelEvent::Kind::NewFace, 3}, 12);
    CHECK(up.D == 4);
    CHECK(up.delta_H == 0);

    // GlueRight swallowing fewer than the current-height edges
    up = apply_layer_rule(9, {PeelEvent::Kind::GlueRight, 1}, 6);
    CHECK(up.D == 5); // 9 - 2*(1+1)
    CHECK(up.delta_H == 0);

    // GlueRight exhausting the current height completes the layer
    up = apply_layer_rule(4, {PeelEvent::Kind::GlueRight, 1}, 6);
    CHECK(up.D == 12);
    CHECK(up.delta_H == 1);

    // GlueLeft caps D by the new boundary length
    up = apply_layer_rule(9, {PeelEvent::Kind::GlueLeft, 3}, 2);
    CHECK(up.D == 4); // min(8, 2*2)
    CHECK(up.delta_H == 0);
    up = apply_layer_rule(9, {PeelEvent::Kind::GlueLeft, 0}, 50);
    CHECK(up.D == 8);
    CHECK(up.delta_H == 0);
}

TEST_CASE("hypothesis (H) holds along random runs") {
    PeelEngine engine(test_law(), test_nu());
    LayerPeeler peeler(engine);
    RngStream rng(70, 0);
    LayeredState st = LayerPeeler::initial_state();
    CHECK(st.D == 2);
    CHECK(st.H == 0);
    std::int64_t h_prev = 0;
    for (int i = 0; i < 100000; ++i) {
        peeler.layer_step(st, rng); // layer_step asserts 1 <= D <= 2P
        CHECK(st.H - h_prev <= 1);
        CHECK(st.H >= h_prev);
        h_prev = st.H;
    }
}

TEST_CASE("explore_to_radius emits one record per radius, strictly ordered") {
    PeelEngine engine(test_law(), test_nu());
    LayerPeeler peeler(engine);
    RngStream rng(71, 0);
    const auto records = peeler.explore_to_radius(6, rng);
    REQUIRE(!records.empty());
    CHECK(records.front().theta_r >= 1);
    CHECK(records.back().r == 6);
    for (std::size_t i = 0; i < records.size(); ++i)
        CHECK(records[i].r == static_cast<std::int64_t>(i) + 1);
    for (std::size_t i = 1; i < records.size(); ++i)
        CHECK(records[i].theta_r > records[i - 1].theta_r);
}

TEST_CASE("height grows like (log n)^2 / (2 pi^2) (smoke trend)") {
    std::vector<double> scaled;
    const std::int64_t n = 300000;
    for (int r = 0; r < 12; ++r) {
        PeelEngine engine(test_law(), test_nu());
        EngineOptions o;
        o.track_volume = false;
        PeelEngine light(test_law(), test_nu(), o);
        LayerPeeler peeler(light);
        RngStream rng(72, static_cast<std::uint64_t>(r));
        LayeredState st = LayerPeeler::initial_state();
        for (std::int64_t i = 0; i < n; ++i) peeler.layer_step(st, rng);
        const double logn = std::log(static_cast<double>(n));
        scaled.push_back(static_cast<double>(st.H) / (logn * logn));
    }
    const double target = 1.0 / (2.0 * M_PI * M_PI);
    CHECK(median(scaled) > 0.3 * target);
    CHECK(median(scaled) < 3.0 * target);
}

TEST_CASE("first_layer_time: sanity and the scaled median at l = 1000") {
    const NuSampler& nu = test_nu();
    RngStream rng(73, 0);
    CHECK_THROWS_AS(first_layer_time(nu, 1, rng), InvalidPerimeter);
    std::vector<double> scaled;
    for (int r = 0; r < 400; ++r) {
        const std::int64_t sigma = first_layer_time(nu, 1000, rng);
        CHECK(sigma >= 1);
        scaled.push_back(static_cast<double>(sigma) * test_law().p_q() * std::log(1000.0) /
                         2000.0);
    }
    // log-slow convergence: generous smoke bracket at l = 1e3
    CHECK(median(scaled) > 0.5);
    CHECK(median(scaled) < 2.0);
}

TEST_CASE("A' walk satisfies its n log n law of large numbers") {
    const NuSampler& nu = test_nu();
    const std::int64_t n = 1000000;
    std::vector<double> scaled;
    for (int r = 0; r < 10; ++r) {
        RngStream rng(74, static_cast<std::uint64_t>(r));
        std::int64_t a = 0;
        for (std::int64_t i = 0; i < n; ++i) a += a_prime_step(nu, rng);
        scaled.push_back(static_cast<double>(a) /
                         (static_cast<double>(n) * std::log(static_cast<double>(n))));
    }
    // converges from above: the truncated mean carries a log log n / log n
    // overshoot plus the order-one step floor, ~40% at n = 1e6
    const double ratio = median(scaled) / test_law().p_q();
    CHECK(ratio > 1.0);
    CHECK(ratio < 1.65);
}
