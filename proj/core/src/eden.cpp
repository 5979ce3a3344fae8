#include "peellab/eden.hpp"

#include <algorithm>

#include "peellab/detail/numeric.hpp"
#include "peellab/errors.hpp"

namespace peellab {

ClockedTrajectory eden_run(PeelEngine& engine, std::int64_t n_steps, std::int64_t stride,
                           RngStream& rng) {
    if (n_steps < 1) throw InvalidState("eden_run requires n_steps >= 1");
    if (stride < 1) stride = 1;
    ClockedTrajectory traj;
    traj.law_fingerprint = engine.law().fingerprint_hex();
    traj.master_seed = rng.master_seed();
    traj.stream_id = rng.stream_id();
    traj.stride = stride;

    ExplorationState st = PeelEngine::initial_state(PeelMode::plane);
    detail::KahanSum clock; // ~1e6 small increments: compensated
    traj.rows.push_back({0, 0.0, st.P, st.V, st.F});
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        // e_i is drawn after P_i is known: rate 2 P_i for the full boundary
        clock.add(rng.exponential(1.0) / (2.0 * static_cast<double>(st.P)));
        engine.step(st, rng);
        if (i % stride == 0 || i == n_steps)
            traj.rows.push_back({st.n, clock.value(), st.P, st.V, st.F});
    }
    return traj;
}

HullSnapshot hull_at_time(const ClockedTrajectory& traj, double t) {
    if (traj.rows.empty()) throw InvalidState("empty trajectory");
    if (t > traj.rows.back().T) throw InvalidState("query time beyond the recorded clock");
    // first recorded row with T > t; the hull is the state just before it
    auto it = std::upper_bound(traj.rows.begin(), traj.rows.end(), t,
                               [](double value, const ClockedRow& row) { return value < row.T; });
    if (it == traj.rows.begin()) {
        const ClockedRow& r0 = traj.rows.front();
        return {r0.n, r0.P, r0.V, r0.F};
    }
    --it;
    return {it->n, it->P, it->V, it->F};
}

} // namespace peellab
