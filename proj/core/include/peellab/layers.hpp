#pragma once

#include <cstdint>
#include <vector>

#include "peellab/peel_engine.hpp"

namespace peellab {

// Peeling-by-layers state: under hypothesis (H) the boundary carries edges at
// exactly the heights H and H+1, with D of the 2P edges at height H.
struct LayeredState {
    ExplorationState es;
    std::int64_t D = 2; // root-face-of-degree-2 convention: D0 = 2P0 = 2
    std::int64_t H = 0;
};

struct HullRecord {
    std::int64_t r;
    std::int64_t theta_r;
    std::int64_t half_perimeter;
    std::uint64_t vertices;
    std::uint64_t faces;
};

struct LayerUpdate {
    std::int64_t D;
    std::int64_t delta_H; // 0 or 1
};

// The (D, H) update of the peeling by layers, given the boundary had d edges
// at the current height, the drawn event, and the new half-perimeter. When
// d = 1 the layer completes whatever the event; a right identification
// swallowing the remaining current-height edges also completes it.
LayerUpdate apply_layer_rule(std::int64_t d, const PeelEvent& ev, std::int64_t p_new);

class LayerPeeler {
public:
    explicit LayerPeeler(PeelEngine& engine) : engine_(&engine) {}

    static LayeredState initial_state() {
        LayeredState st;
        st.es = PeelEngine::initial_state(PeelMode::plane);
        st.D = 2;
        st.H = 0;
        return st;
    }

    // one peel step at the layer peel edge, with the (D, H) update
    PeelEvent layer_step(LayeredState& st, RngStream& rng);

    // run until H = r_max, emitting a record at each theta_r
    std::vector<HullRecord> explore_to_radius(std::int64_t r_max, RngStream& rng,
                                              std::int64_t max_steps = 0);

    PeelEngine& engine() { return *engine_; }

private:
    PeelEngine* engine_;
};

// sigma_l: number of half-plane layer-peeling steps until all 2l edges of the
// initial boundary have been swallowed (completes the first layer).
std::int64_t first_layer_time(const NuSampler& nu, std::int64_t l, RngStream& rng);

// Step of the lower-bound counter A': 1 for a new face or a left
// identification, 2(j+1) for a right identification swallowing a 2j-hole.
std::int64_t a_prime_step(const NuSampler& nu, RngStream& rng);

} // namespace peellab
