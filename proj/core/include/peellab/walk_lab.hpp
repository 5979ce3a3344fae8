#pragma once

#include <cstdint>
#include <vector>

#include "peellab/errors.hpp"
#include "peellab/estimators.hpp"
#include "peellab/rng.hpp"
#include "peellab/sampling.hpp"
#include "peellab/step_law.hpp"

namespace peellab {

// Discrete walk law in the Cauchy domain of attraction:
//   P(W = k) = c+/(k(k+1)), P(W = -k) = c-/(k(k+1)) for k >= 1,
// plus a two-point atom on {a, a+1} carrying the leftover mass, tuned so the
// centring parameter b = lim E[W/(1+(W/n)^2)] matches the target.
class CauchyWalkLaw {
public:
    double c_plus() const { return c_plus_; }
    double c_minus() const { return c_minus_; }
    double b() const { return b_; }

    std::int64_t sample(RngStream& rng) const;
    double pmf(std::int64_t k) const;

    // E[W/(1+(W/n)^2)] evaluated analytically at a given horizon
    double b_at_horizon(double n) const;

    friend CauchyWalkLaw make_walk_law(double c_plus, double c_minus, double target_b);

private:
    double c_plus_ = 0.0, c_minus_ = 0.0;
    std::int64_t atom_ = 0;           // support {atom, atom+1}
    double atom_mass_lo_ = 0.0;       // mass at atom
    double atom_mass_hi_ = 0.0;       // mass at atom+1
    double b_ = 0.0;
};

CauchyWalkLaw make_walk_law(double c_plus, double c_minus, double target_b);

// rho = 1/2 + arctan(b / (pi c_plus)) / pi  (entrance-time tail exponent in
// the balanced-tail case)
double rho_prediction(double b, double c_plus);

struct SurvivalCurve {
    std::vector<std::int64_t> n_grid;
    std::vector<std::int64_t> survivors;
    std::int64_t replicas = 0;
};

struct TauTailResult {
    SurvivalCurve curve;
    TailEstimate slope;     // log-log slope of P(tau >= n); negative
    double rho_predicted;   // analytic prediction (NaN when c+ != c-)
};

// Monte-Carlo survival curve of tau = inf{n >= 1 : W_n <= -1}; walks are
// right-censored at 100 * max(n_grid) steps and count as survivors on the
// whole grid. The slope window excludes n < 100 and grid points with fewer
// than 50 surviving replicas.
TauTailResult tau_tail(const CauchyWalkLaw& law, const std::vector<std::int64_t>& n_grid,
                       std::int64_t replicas, RngStream& rng, int bootstrap_reps = 200);

// Same simulation for an arbitrary integer step sampler (used to cross-check
// the percolation interface walk against the entrance-time machinery).
template <typename StepFn>
TauTailResult tau_tail_sim(StepFn&& step, const std::vector<std::int64_t>& n_grid,
                           std::int64_t replicas, RngStream& rng, int bootstrap_reps = 200);

// Entrance times only, right-censored at cap (n_grid.back() * 100 when the
// cap is 0); never throws on sparse grids, so partial curves can be merged
// across workers.
template <typename StepFn>
std::vector<std::int64_t> tau_samples_sim(StepFn&& step, std::int64_t replicas, RngStream& rng,
                                          std::int64_t cap) {
    std::vector<std::int64_t> tau(static_cast<std::size_t>(replicas));
    for (auto& t : tau) {
        std::int64_t w = 0;
        std::int64_t n = 0;
        while (n < cap) {
            ++n;
            w += step(rng);
            if (w <= -1) break;
        }
        t = (w <= -1) ? n : cap + 1; // censored: counts as tau > n below the cap
    }
    return tau;
}

SurvivalCurve survival_from_taus(const std::vector<std::int64_t>& tau,
                                 const std::vector<std::int64_t>& n_grid);

namespace detail_walk {
TauTailResult tau_tail_from_samples(std::vector<std::int64_t> tau,
                                    const std::vector<std::int64_t>& n_grid, RngStream& rng,
                                    int bootstrap_reps);
void validate_grid(const std::vector<std::int64_t>& n_grid);
}

template <typename StepFn>
TauTailResult tau_tail_sim(StepFn&& step, const std::vector<std::int64_t>& n_grid,
                           std::int64_t replicas, RngStream& rng, int bootstrap_reps) {
    if (replicas < 1) throw EmptySample("tau_tail: no replicas");
    detail_walk::validate_grid(n_grid);
    auto tau = tau_samples_sim(step, replicas, rng, n_grid.back() * 100);
    return detail_walk::tau_tail_from_samples(std::move(tau), n_grid, rng, bootstrap_reps);
}

// Estimate of P(|W_n/(n log n) - c| >= delta) for the non-negative walk with
// P(xi = k) = c/(k(k+1)) and an atom at zero
double increasing_walk_deviation(double c, double delta, std::int64_t n, std::int64_t replicas,
                                 RngStream& rng);

// KS distance between the empirical law of S_n/n (S the half-plane step walk)
// and the Cauchy distribution of scale pi p_q
double cauchy_gof(const StepLaw& law, const NuSampler& nu, std::int64_t n,
                  std::int64_t replicas, RngStream& rng);

double cauchy_cdf(double x, double scale);

} // namespace peellab
