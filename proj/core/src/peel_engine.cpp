#include "peellab/peel_engine.hpp"

#include "peellab/errors.hpp"

namespace peellab {

const char* to_string(PeelMode mode) {
    return mode == PeelMode::plane ? "plane" : "half-plane";
}

PeelEngine::PeelEngine(const StepLaw& law, const NuSampler& nu, EngineOptions opts)
    : law_(&law), nu_(&nu), opts_(opts),
      conditioned_(law, nu, opts.conditioned_table_threshold),
      finite_(law, nu, opts.finite_table_threshold) {}

PeelEvent PeelEngine::draw_event(const ExplorationState& st, RngStream& rng) {
    if (st.mode == PeelMode::plane) {
        if (st.P < 1) throw InvalidState("plane-mode exploration left N");
        return conditioned_.sample(st.P, rng);
    }
    const std::int64_t s = nu_->sample(rng);
    if (s >= 0) return {PeelEvent::Kind::NewFace, s + 1};
    const auto kind = rng.next_u64() & 1 ? PeelEvent::Kind::GlueLeft : PeelEvent::Kind::GlueRight;
    return {kind, -s - 1};
}

void PeelEngine::apply(ExplorationState& st, const PeelEvent& ev, RngStream& rng) {
    if (ev.kind == PeelEvent::Kind::NewFace) {
        st.P += ev.value - 1;
        st.F += 1;
    } else {
        const std::int64_t j = ev.value;
        st.P -= j + 1;
        if (st.mode == PeelMode::plane && st.P < 1)
            throw InvalidState("conditioned kernel produced P < 1");
        // Delta V is null when the swallowed hole has half-perimeter j < 1
        if (j >= 1 && opts_.track_volume) {
            const FillResult fill = fill_hole(j, rng);
            st.V += fill.vertices;
            st.F += fill.faces;
        }
    }
    st.n += 1;
}

PeelEvent PeelEngine::step(ExplorationState& st, RngStream& rng) {
    const PeelEvent ev = draw_event(st, rng);
    apply(st, ev, rng);
    return ev;
}

FillResult PeelEngine::fill_hole(std::int64_t l, RngStream& rng) {
    if (l < 0) throw InvalidPerimeter("fill_hole requires l >= 0");
    FillResult out;
    if (l == 0) {
        out.vertices = 1; // the vertex map
        return out;
    }
    worklist_.clear();
    worklist_.push_back(l);
    while (!worklist_.empty()) {
        const std::int64_t m = worklist_.back();
        worklist_.pop_back();
        if (m == 0) {
            out.vertices += 1;
            continue;
        }
        if (++out.peel_steps > opts_.fill_budget)
            throw WorkBudgetExceeded("fill_hole exceeded its work budget");
        const FiniteEvent ev = finite_.sample(m, rng);
        if (ev.kind == FiniteEvent::Kind::NewFace) {
            out.faces += 1;
            worklist_.push_back(m + ev.value - 1);
        } else {
            worklist_.push_back(ev.value);
            worklist_.push_back(m - 1 - ev.value);
        }
    }
    return out;
}

Trajectory PeelEngine::run(PeelMode mode, std::int64_t n_steps, std::int64_t stride,
                           RngStream& rng) {
    if (n_steps < 1) throw InvalidState("run requires n_steps >= 1");
    if (stride < 1) stride = 1;
    Trajectory traj;
    traj.law_fingerprint = law_->fingerprint_hex();
    traj.master_seed = rng.master_seed();
    traj.stream_id = rng.stream_id();
    traj.mode = mode;
    traj.stride = stride;

    ExplorationState st = initial_state(mode);
    traj.rows.push_back({st.n, st.P, st.V, st.F});
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        step(st, rng);
        if (i % stride == 0 || i == n_steps) traj.rows.push_back({st.n, st.P, st.V, st.F});
    }
    return traj;
}

} // namespace peellab
