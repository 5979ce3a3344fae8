#pragma once

#include <cstdint>

#include "peellab/rng.hpp"
#include "peellab/sampling.hpp"
#include "peellab/step_law.hpp"

namespace peellab {

// Interface-following exploration of face percolation on the half-plane map:
// the black boundary segment length follows the walk increment X of the
// five-case peeling, applied to l-1.
struct InterfaceState {
    std::int64_t black_len = 1; // P*, number of black boundary edges
    std::int64_t theta = 0;     // peel steps so far
    std::int64_t N = 0;         // white-discovery / left-white events
    double p = 0.5;
};

struct ClusterStats {
    std::int64_t theta = 0;
    std::int64_t N = 0;
    std::int64_t N_prime = 0;
    std::int64_t L_lo = 0; // max(N, N')
    std::int64_t L_hi = 0; // N + N'
    bool capped = false;   // hit the step cap before absorption
};

class PercoWalk {
public:
    PercoWalk(const StepLaw& law, const NuSampler& nu, double p);

    struct Step {
        std::int64_t X;
        bool n_event; // the two X = -1 sub-cases that count towards N
    };
    Step step(RngStream& rng) const;

    // exact X-law masses, for tests and normalization checks
    double pmf_black(std::int64_t k) const;     // P(X = 2k), k >= 0
    double pmf_minus_one() const;               // P(X = -1)
    double pmf_glue_right(std::int64_t k) const;// P(X = -2k-2), k >= 0
    double total_mass(std::int64_t k_cut) const;

    double p() const { return p_; }

private:
    const StepLaw* law_;
    const NuSampler* nu_;
    double p_;
    double thr_black_, thr_white_, thr_left_; // cumulative branch thresholds
};

// one transition of the interface exploration; requires black_len >= 1
void perco_step(InterfaceState& st, const PercoWalk& walk, RngStream& rng);

// explores the root cluster to absorption (plus an independent mirrored run
// for N'); step_cap right-censors theta
ClusterStats run_cluster(const PercoWalk& walk, RngStream& rng, std::int64_t step_cap);

// partial sums of the cut-edge mass: sum_{m=0}^{w-1} (2m+1) nu(-m-1)/2
double cut_edge_mass(const StepLaw& law, std::int64_t window);

// tail exponent of the interface length: 1 below p=1/2, arctan(2 pi p_q)/pi
// at p=1/2, 0 above
double lambda_prediction(const StepLaw& law, double p);

} // namespace peellab
