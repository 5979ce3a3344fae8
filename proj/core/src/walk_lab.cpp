#include "peellab/walk_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peellab/detail/numeric.hpp"
#include "peellab/errors.hpp"

namespace peellab {

namespace {

// inverse of the exact tail P(K >= k) = 1/k of the normalized family
// p(k) = 1/(k(k+1)): k = floor(1/u)
std::int64_t sample_rational_positive(RngStream& rng) {
    for (;;) {
        const double u = rng.uniform01_open();
        const double x = 1.0 / u;
        if (x > 9e14) continue;
        return static_cast<std::int64_t>(x);
    }
}

} // namespace

CauchyWalkLaw make_walk_law(double c_plus, double c_minus, double target_b) {
    if (!(c_plus > 0.0) || !(c_minus > 0.0))
        throw UnreachableB("tail constants must be positive");
    const double atom_mass = 1.0 - c_plus - c_minus;
    if (atom_mass < -1e-15) throw UnreachableB("c_plus + c_minus exceeds total mass 1");

    CauchyWalkLaw law;
    law.c_plus_ = c_plus;
    law.c_minus_ = c_minus;

    constexpr std::int64_t kAtomCap = 64;
    if (atom_mass <= 1e-15) {
        if (target_b != 0.0) throw UnreachableB("no spare mass to tune b");
        law.atom_ = 0;
        law.atom_mass_lo_ = law.atom_mass_hi_ = 0.0;
    } else {
        const double ratio = target_b / atom_mass;
        const double a_floor = std::floor(ratio);
        if (std::fabs(a_floor) > static_cast<double>(kAtomCap))
            throw UnreachableB("target b outside the reachable atom range");
        law.atom_ = static_cast<std::int64_t>(a_floor);
        law.atom_mass_hi_ = target_b - a_floor * atom_mass; // in [0, atom_mass)
        law.atom_mass_lo_ = atom_mass - law.atom_mass_hi_;
    }
    law.b_ = law.b_at_horizon(1e8);
    return law;
}

double CauchyWalkLaw::pmf(std::int64_t k) const {
    double mass = 0.0;
    if (k >= 1) {
        const double kk = static_cast<double>(k);
        mass += c_plus_ / (kk * (kk + 1.0));
    } else if (k <= -1) {
        const double kk = static_cast<double>(-k);
        mass += c_minus_ / (kk * (kk + 1.0));
    }
    if (k == atom_) mass += atom_mass_lo_;
    if (k == atom_ + 1) mass += atom_mass_hi_;
    return mass;
}

std::int64_t CauchyWalkLaw::sample(RngStream& rng) const {
    const double u = rng.uniform01();
    if (u < c_plus_) return sample_rational_positive(rng);
    if (u < c_plus_ + c_minus_) return -sample_rational_positive(rng);
    const double w = u - c_plus_ - c_minus_;
    return w < atom_mass_lo_ ? atom_ : atom_ + 1;
}

double CauchyWalkLaw::b_at_horizon(double n) const {
    // sum_k k p(k) / (1 + (k/n)^2): the symmetric c-parts contribute
    // (c+ - c-) * S(n) with S(n) = sum_{k>=1} 1/((k+1)(1+(k/n)^2))
    double s = 0.0;
    if (c_plus_ != c_minus_) {
        detail::KahanSum acc;
        const std::int64_t direct = 1 << 20;
        for (std::int64_t k = 1; k <= direct; ++k) {
            const double kk = static_cast<double>(k);
            acc.add(1.0 / ((kk + 1.0) * (1.0 + (kk / n) * (kk / n))));
        }
        // closed-form remainder of int dx /((x+1)(1+(x/n)^2))
        const double A = 1.0 / (1.0 + 1.0 / (n * n));
        auto antiderivative = [&](double x) {
            return A * std::log((x + 1.0) / std::sqrt(1.0 + (x / n) * (x / n))) +
                   (A / n) * std::atan(x / n);
        };
        const double X = static_cast<double>(direct) + 0.5;
        const double at_inf = A * std::log(n) + (A / n) * (M_PI / 2.0);
        acc.add(at_inf - antiderivative(X));
        s = acc.value();
    }
    double b = (c_plus_ - c_minus_) * s;
    const double a_lo = static_cast<double>(atom_);
    const double a_hi = a_lo + 1.0;
    b += atom_mass_lo_ * a_lo / (1.0 + (a_lo / n) * (a_lo / n));
    b += atom_mass_hi_ * a_hi / (1.0 + (a_hi / n) * (a_hi / n));
    return b;
}

double rho_prediction(double b, double c_plus) {
    return 0.5 + std::atan(b / (M_PI * c_plus)) / M_PI;
}

SurvivalCurve survival_from_taus(const std::vector<std::int64_t>& tau,
                                 const std::vector<std::int64_t>& n_grid) {
    SurvivalCurve curve;
    curve.n_grid = n_grid;
    curve.replicas = static_cast<std::int64_t>(tau.size());
    curve.survivors.assign(n_grid.size(), 0);
    for (const std::int64_t t : tau)
        for (std::size_t g = 0; g < n_grid.size(); ++g)
            if (t >= n_grid[g]) curve.survivors[g] += 1;
    return curve;
}

namespace detail_walk {

void validate_grid(const std::vector<std::int64_t>& n_grid) {
    if (n_grid.empty()) throw EmptySample("tau_tail: empty grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw EmptySample("tau_tail: grid must increase");
    if (n_grid.front() < 2) throw EmptySample("tau_tail: grid must start at n >= 2");
}

TauTailResult tau_tail_from_samples(std::vector<std::int64_t> tau,
                                    const std::vector<std::int64_t>& n_grid, RngStream& rng,
                                    int bootstrap_reps) {
    TauTailResult out;
    out.curve = survival_from_taus(tau, n_grid);

    auto curve_points = [&](const std::vector<std::int64_t>& taus) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t g = 0; g < n_grid.size(); ++g) {
            if (n_grid[g] < 100) continue; // pre-asymptotic window
            std::int64_t surv = 0;
            for (const std::int64_t t : taus)
                if (t >= n_grid[g]) ++surv;
            if (surv < 50) continue; // tail-variance control
            pts.push_back({static_cast<double>(n_grid[g]),
                           static_cast<double>(surv) / static_cast<double>(taus.size())});
        }
        return pts;
    };

    const auto pts = curve_points(tau);
    if (pts.size() < 3) throw EmptySample("tau_tail: too few usable grid points");
    double slope, rms;
    if (!slope_of_logs(pts, &slope, &rms)) throw EmptySample("tau_tail: degenerate grid");
    out.slope.slope = slope;
    out.slope.residual_rms = rms;
    for (const auto& [x, y] : pts) out.slope.n_grid.push_back(x);

    // bootstrap over replicas
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(bootstrap_reps));
    std::vector<std::int64_t> resample(tau.size());
    for (int rep = 0; rep < bootstrap_reps; ++rep) {
        for (auto& t : resample) t = tau[rng.uniform_below(tau.size())];
        const auto rpts = curve_points(resample);
        double s;
        if (rpts.size() >= 3 && slope_of_logs(rpts, &s, nullptr)) slopes.push_back(s);
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        out.slope.ci_low = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
        out.slope.ci_high = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
    } else {
        out.slope.ci_low = out.slope.ci_high = slope;
    }
    return out;
}

} // namespace detail_walk

TauTailResult tau_tail(const CauchyWalkLaw& law, const std::vector<std::int64_t>& n_grid,
                       std::int64_t replicas, RngStream& rng, int bootstrap_reps) {
    TauTailResult out = tau_tail_sim([&law](RngStream& r) { return law.sample(r); }, n_grid,
                                     replicas, rng, bootstrap_reps);
    out.rho_predicted = law.c_plus() == law.c_minus()
                            ? rho_prediction(law.b(), law.c_plus())
                            : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double increasing_walk_deviation(double c, double delta, std::int64_t n, std::int64_t replicas,
                                 RngStream& rng) {
    if (!(c > 0.0 && c <= 1.0)) throw EmptySample("increasing_walk: c must be in (0,1]");
    if (!(delta > 0.0)) throw EmptySample("increasing_walk: delta must be positive");
    if (n < 2 || replicas < 1) throw EmptySample("increasing_walk: degenerate n or replicas");
    const double scale = static_cast<double>(n) * std::log(static_cast<double>(n));
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < replicas; ++r) {
        std::int64_t w = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double u = rng.uniform01();
            if (u < c) {
                const double x = c / std::max(u, 1e-300);
                w += x > 9e14 ? static_cast<std::int64_t>(9e14)
                              : static_cast<std::int64_t>(x);
            }
        }
        if (std::fabs(static_cast<double>(w) / scale - c) >= delta) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(replicas);
}

double cauchy_cdf(double x, double scale) { return 0.5 + std::atan(x / scale) / M_PI; }

double cauchy_gof(const StepLaw& law, const NuSampler& nu, std::int64_t n,
                  std::int64_t replicas, RngStream& rng) {
    if (n < 1 || replicas < 1) throw EmptySample("cauchy_gof: degenerate n or replicas");
    std::vector<double> values(static_cast<std::size_t>(replicas));
    for (auto& v : values) {
        std::int64_t s = 0;
        for (std::int64_t i = 0; i < n; ++i) s += nu.sample(rng);
        v = static_cast<double>(s) / static_cast<double>(n);
    }
    const double scale = M_PI * law.p_q();
    return ks_statistic(std::move(values), [scale](double x) { return cauchy_cdf(x, scale); });
}

} // namespace peellab
