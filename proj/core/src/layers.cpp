#include "peellab/layers.hpp"

#include "peellab/errors.hpp"

namespace peellab {

LayerUpdate apply_layer_rule(std::int64_t d, const PeelEvent& ev, std::int64_t p_new) {
    if (d == 1) return {2 * p_new, 1}; // the last current-height edge is peeled
    if (ev.kind == PeelEvent::Kind::NewFace) return {d - 1, 0};
    if (ev.kind == PeelEvent::Kind::GlueRight) {
        const std::int64_t swallowed = 2 * (ev.value + 1);
        if (d - swallowed > 0) return {d - swallowed, 0};
        return {2 * p_new, 1}; // current-height boundary exhausted
    }
    return {std::min<std::int64_t>(d - 1, 2 * p_new), 0}; // GlueLeft
}

PeelEvent LayerPeeler::layer_step(LayeredState& st, RngStream& rng) {
    const std::int64_t d = st.D;
    const PeelEvent ev = engine_->draw_event(st.es, rng);
    engine_->apply(st.es, ev, rng);
    const LayerUpdate up = apply_layer_rule(d, ev, st.es.P);
    st.D = up.D;
    st.H += up.delta_H;
    if (st.D < 1 || st.D > 2 * st.es.P) throw InvalidState("layer state violates hypothesis (H)");
    return ev;
}

std::vector<HullRecord> LayerPeeler::explore_to_radius(std::int64_t r_max, RngStream& rng,
                                                       std::int64_t max_steps) {
    if (r_max < 1) throw InvalidPerimeter("explore_to_radius requires r_max >= 1");
    std::vector<HullRecord> records;
    records.reserve(static_cast<std::size_t>(r_max));
    LayeredState st = initial_state();
    while (st.H < r_max) {
        const std::int64_t h_before = st.H;
        layer_step(st, rng);
        if (st.H > h_before)
            records.push_back({st.H, st.es.n, st.es.P, st.es.V, st.es.F});
        if (max_steps > 0 && st.es.n >= max_steps) break;
    }
    return records;
}

std::int64_t first_layer_time(const NuSampler& nu, std::int64_t l, RngStream& rng) {
    if (l < 2) throw InvalidPerimeter("first_layer_time requires l >= 2");
    // remaining initial-boundary edges; sigma_l is hit when all 2l are gone
    std::int64_t d = 2 * l;
    std::int64_t n = 0;
    while (d > 0) {
        ++n;
        const std::int64_t s = nu.sample(rng);
        if (s >= 0) {
            d -= 1;
        } else if (rng.next_u64() & 1) {
            d -= 2 * (-s); // right identification swallows the 2j-hole and both edges
        } else {
            d -= 1;
        }
    }
    return n;
}

std::int64_t a_prime_step(const NuSampler& nu, RngStream& rng) {
    const std::int64_t s = nu.sample(rng);
    if (s >= 0) return 1;
    if (rng.next_u64() & 1) return 2 * (-s);
    return 1;
}

} // namespace peellab
