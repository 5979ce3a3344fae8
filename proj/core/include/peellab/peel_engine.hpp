#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peellab/rng.hpp"
#include "peellab/sampling.hpp"
#include "peellab/step_law.hpp"

namespace peellab {

enum class PeelMode : std::uint8_t { plane, half_plane };

const char* to_string(PeelMode mode);

// Filled-in exploration bookkeeping. In plane mode P is the half-perimeter of
// the hole and stays >= 1 with P_0 = 1; in half-plane mode P is the algebraic
// variation of the boundary length and starts at 0.
struct ExplorationState {
    PeelMode mode = PeelMode::plane;
    std::int64_t P = 1;
    std::uint64_t V = 0; // vertices contributed by filled-in holes
    std::uint64_t F = 0; // faces discovered, including inside fills
    std::int64_t n = 0;  // peel steps taken
};

struct FillResult {
    std::uint64_t vertices = 0;
    std::uint64_t faces = 0;
    std::uint64_t peel_steps = 0;
};

struct TrajectoryRow {
    std::int64_t n;
    std::int64_t P;
    std::uint64_t V;
    std::uint64_t F;
};

struct Trajectory {
    std::string law_fingerprint;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    PeelMode mode = PeelMode::plane;
    std::int64_t stride = 1;
    std::vector<TrajectoryRow> rows;
};

struct EngineOptions {
    bool track_volume = true;                    // run fills and count (V, F)
    std::uint64_t fill_budget = 1000000000ULL;   // kernel draws allowed per fill
    std::int64_t conditioned_table_threshold = 2048;
    std::int64_t finite_table_threshold = 256;
};

// One exploration worker: owns the per-replica samplers (their caches are
// mutable), shares the immutable law and global nu sampler.
class PeelEngine {
public:
    PeelEngine(const StepLaw& law, const NuSampler& nu, EngineOptions opts = {});

    static ExplorationState initial_state(PeelMode mode) {
        ExplorationState st;
        st.mode = mode;
        st.P = mode == PeelMode::plane ? 1 : 0;
        return st;
    }

    // draw one peel event from the mode's kernel and apply it
    PeelEvent step(ExplorationState& st, RngStream& rng);

    // apply an externally drawn event (used by the layer peeler)
    void apply(ExplorationState& st, const PeelEvent& ev, RngStream& rng);

    // resolve a finite hole of half-perimeter l via the worklist
    FillResult fill_hole(std::int64_t l, RngStream& rng);

    Trajectory run(PeelMode mode, std::int64_t n_steps, std::int64_t stride, RngStream& rng);

    PeelEvent draw_event(const ExplorationState& st, RngStream& rng);

    const StepLaw& law() const { return *law_; }
    const NuSampler& nu() const { return *nu_; }
    const EngineOptions& options() const { return opts_; }
    ConditionedSampler& conditioned() { return conditioned_; }
    FiniteSampler& finite() { return finite_; }

private:
    const StepLaw* law_;
    const NuSampler* nu_;
    EngineOptions opts_;
    ConditionedSampler conditioned_;
    FiniteSampler finite_;
    std::vector<std::int64_t> worklist_;
};

} // namespace peellab
