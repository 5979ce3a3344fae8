#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peellab/peel_engine.hpp"

namespace peellab {

struct ClockedRow {
    std::int64_t n;
    double T;
    std::int64_t P;
    std::uint64_t V;
    std::uint64_t F;
};

// Uniform peeling with exponential clocks: T_n = sum e_i / (2 P_i). The edge
// choice does not change the (P, V) law, so the clock is layered on the
// ordinary conditioned chain.
struct ClockedTrajectory {
    std::string law_fingerprint;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::int64_t stride = 1;
    std::vector<ClockedRow> rows;
};

ClockedTrajectory eden_run(PeelEngine& engine, std::int64_t n_steps, std::int64_t stride,
                           RngStream& rng);

struct HullSnapshot {
    std::int64_t n;
    std::int64_t half_perimeter;
    std::uint64_t vertices;
    std::uint64_t faces;
};

// State at U_t - 1 with U_t = inf{n : T_n > t}, resolved on the recorded rows
// (exact when the trajectory was recorded at stride 1).
HullSnapshot hull_at_time(const ClockedTrajectory& traj, double t);

} // namespace peellab
