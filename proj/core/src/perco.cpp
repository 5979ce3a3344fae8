#include "peellab/perco.hpp"

#include <cmath>

#include "peellab/detail/numeric.hpp"
#include "peellab/errors.hpp"

namespace peellab {

PercoWalk::PercoWalk(const StepLaw& law, const NuSampler& nu, double p)
    : law_(&law), nu_(&nu), p_(p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidState("percolation parameter must be in (0, 1]");
    const double pos = law.pos_mass();
    const double neg = law.neg_mass();
    thr_black_ = p * pos;
    thr_white_ = thr_black_ + (1.0 - p) * pos;
    thr_left_ = thr_white_ + neg / 2.0;
    // remaining mass neg/2 is the right identification branch
}

PercoWalk::Step PercoWalk::step(RngStream& rng) const {
    const double u = rng.uniform01() * (thr_left_ + law_->neg_mass() / 2.0);
    if (u < thr_black_) return {2 * nu_->sample_pos(rng), false};
    if (u < thr_white_) return {-1, true};  // new white face
    if (u < thr_left_) return {-1, true};   // identified with a left edge
    return {-2 * nu_->sample_neg(rng), false};
}

double PercoWalk::pmf_black(std::int64_t k) const { return p_ * law_->nu_pos(k); }

double PercoWalk::pmf_minus_one() const {
    return (1.0 - p_) * law_->pos_mass() + law_->neg_mass() / 2.0;
}

double PercoWalk::pmf_glue_right(std::int64_t k) const { return law_->nu_neg(k + 1) / 2.0; }

double PercoWalk::total_mass(std::int64_t k_cut) const {
    detail::KahanSum acc;
    for (std::int64_t k = 0; k <= k_cut; ++k) acc.add(pmf_black(k));
    acc.add(p_ * law_->pos_tail_mass(k_cut));
    acc.add(pmf_minus_one());
    for (std::int64_t k = 0; k <= k_cut; ++k) acc.add(pmf_glue_right(k));
    acc.add(law_->neg_tail_mass(k_cut + 1) / 2.0);
    return acc.value();
}

void perco_step(InterfaceState& st, const PercoWalk& walk, RngStream& rng) {
    if (st.black_len < 1) throw InvalidState("perco_step requires black boundary edges");
    const PercoWalk::Step s = walk.step(rng);
    st.black_len += s.X;
    st.theta += 1;
    if (s.n_event) st.N += 1;
}

ClusterStats run_cluster(const PercoWalk& walk, RngStream& rng, std::int64_t step_cap) {
    ClusterStats out;
    auto explore = [&](std::int64_t* n_count) {
        InterfaceState st;
        st.p = walk.p();
        while (st.black_len >= 1) {
            perco_step(st, walk, rng);
            if (step_cap > 0 && st.theta >= step_cap && st.black_len >= 1) {
                out.capped = true;
                break;
            }
        }
        *n_count = st.N;
        return st.theta;
    };
    out.theta = explore(&out.N);
    // independent mirrored exploration has the same law
    explore(&out.N_prime);
    out.L_lo = std::max(out.N, out.N_prime);
    out.L_hi = out.N + out.N_prime;
    return out;
}

double cut_edge_mass(const StepLaw& law, std::int64_t window) {
    if (window < 1) throw InvalidState("cut_edge_mass requires window >= 1");
    detail::KahanSum acc;
    for (std::int64_t m = 0; m < window; ++m)
        acc.add(static_cast<double>(2 * m + 1) * 0.5 * law.nu_neg(m + 1));
    return acc.value();
}

double lambda_prediction(const StepLaw& law, double p) {
    if (p < 0.5) return 1.0;
    if (p > 0.5) return 0.0;
    return std::atan(2.0 * M_PI * law.p_q()) / M_PI;
}

} // namespace peellab
