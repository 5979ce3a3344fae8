#include "peellab/step_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "peellab/detail/numeric.hpp"
#include "peellab/errors.hpp"

namespace peellab {

using detail::KahanSum;
using detail::tail_sum_pos_h;
using detail::zeta_tail;

namespace {

// The recursion extracts nu(-j) ~ j^{-2} by cancellation against operands of
// size h(l), so it runs in long double end to end; values are rounded to
// double only when stored into the law.
long double dot4(const long double* a, const long double* b, std::int64_t n) {
    long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L, s3 = 0.0L;
    std::int64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

long double family_base(double beta, std::int64_t k) {
    const long double kk = static_cast<long double>(k);
    const long double one_minus = 1.0L - static_cast<long double>(beta);
    return one_minus / ((kk + 1.0L) * (kk + 2.0L)) +
           static_cast<long double>(beta) * std::exp2(-static_cast<double>(k) - 1.0);
}

struct Recursion {
    double alpha = 0.0;
    std::vector<double> neg;      // neg[j-1] = nu(-j)
    double neg_mass_table = 0.0;
    double tail_c2 = 0.0, tail_c3 = 0.0, tail_c4 = 0.0;
    double defect = 0.0;
    double min_neg = 0.0;
    std::int64_t min_neg_j = 0;
};

// Least-squares fit of j^2 nu(-j) = c2 + c3/j + c4/j^2 over [lo, hi].
void fit_neg_tail(const std::vector<double>& neg, std::int64_t lo, std::int64_t hi,
                  double* c2, double* c3, double* c4) {
    long double m[3][3] = {{0}};
    long double r[3] = {0, 0, 0};
    for (std::int64_t j = lo; j <= hi; ++j) {
        const long double x = 1.0L / static_cast<long double>(j);
        const long double y = static_cast<long double>(neg[static_cast<std::size_t>(j - 1)]) *
                              static_cast<long double>(j) * static_cast<long double>(j);
        const long double basis[3] = {1.0L, x, x * x};
        for (int u = 0; u < 3; ++u) {
            for (int v = 0; v < 3; ++v) m[u][v] += basis[u] * basis[v];
            r[u] += basis[u] * y;
        }
    }
    // 3x3 Cramer solve
    const long double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                            m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                            m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    auto solve_col = [&](int col) {
        long double a[3][3];
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) a[u][v] = (v == col) ? r[u] : m[u][v];
        const long double d = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                              a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                              a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        return static_cast<double>(d / det);
    };
    *c2 = solve_col(0);
    *c3 = solve_col(1);
    *c4 = solve_col(2);
}

// Solves the negative side of nu from h-harmonicity:
//   nu(-(l-1)) = h(l) - sum_{k>=0} nu(k) h(l+k) - sum_{j=1}^{l-2} nu(-j) h(l-j)
// for l = 2 .. depth+1, the positive side being alpha * family_base(beta, .)
// with alpha fixed by the l = 1 identity.
Recursion run_recursion(double beta, std::int64_t depth, std::int64_t direct_cutoff,
                        std::int64_t fit_lo, std::int64_t fit_hi) {
    const std::int64_t K0 = direct_cutoff;

    std::vector<long double> base(static_cast<std::size_t>(K0));
    for (std::int64_t k = 0; k < K0; ++k) base[static_cast<std::size_t>(k)] = family_base(beta, k);

    // local long-double harmonic values from the exact ratio recurrence
    std::vector<long double> hval(static_cast<std::size_t>(depth + K0 + 2));
    hval[0] = 0.0L;
    long double hl = 1.0L;
    for (std::int64_t l = 1; l < static_cast<std::int64_t>(hval.size()); ++l) {
        hval[static_cast<std::size_t>(l)] = hl;
        hl *= static_cast<long double>(2 * l + 1) / static_cast<long double>(2 * l);
    }

    auto weighted_sum_base = [&](std::int64_t l) -> long double {
        const long double s = dot4(base.data(), hval.data() + l, K0);
        return s + (1.0L - static_cast<long double>(beta)) *
                       static_cast<long double>(tail_sum_pos_h(static_cast<double>(l), K0));
    };

    Recursion out;
    const long double alpha = 1.0L / weighted_sum_base(1);
    out.alpha = static_cast<double>(alpha);

    std::vector<long double> neg(static_cast<std::size_t>(depth));
    out.neg.resize(static_cast<std::size_t>(depth));
    out.min_neg = std::numeric_limits<double>::infinity();
    long double mass = 0.0L;
    for (std::int64_t l = 2; l <= depth + 1; ++l) {
        const long double spos = alpha * weighted_sum_base(l);
        // sum_{j=1}^{l-2} nu(-j) h(l-j), h index descending
        long double sneg0 = 0.0L, sneg1 = 0.0L;
        const std::int64_t jn = l - 2;
        std::int64_t j = 1;
        for (; j + 2 <= jn + 1; j += 2) {
            sneg0 += neg[static_cast<std::size_t>(j - 1)] * hval[static_cast<std::size_t>(l - j)];
            sneg1 += neg[static_cast<std::size_t>(j)] * hval[static_cast<std::size_t>(l - j - 1)];
        }
        for (; j <= jn; ++j)
            sneg0 += neg[static_cast<std::size_t>(j - 1)] * hval[static_cast<std::size_t>(l - j)];
        const long double value = hval[static_cast<std::size_t>(l)] - spos - (sneg0 + sneg1);
        neg[static_cast<std::size_t>(l - 2)] = value;
        out.neg[static_cast<std::size_t>(l - 2)] = static_cast<double>(value);
        mass += value;
        if (out.neg[static_cast<std::size_t>(l - 2)] < out.min_neg) {
            out.min_neg = out.neg[static_cast<std::size_t>(l - 2)];
            out.min_neg_j = l - 1;
        }
    }
    out.neg_mass_table = static_cast<double>(mass);

    fit_neg_tail(out.neg, std::min(fit_lo, depth / 2), std::min(fit_hi, depth), &out.tail_c2,
                 &out.tail_c3, &out.tail_c4);
    const double tail = out.tail_c2 * zeta_tail(2, depth) + out.tail_c3 * zeta_tail(3, depth) +
                        out.tail_c4 * zeta_tail(4, depth);
    out.defect = static_cast<double>(mass + static_cast<long double>(out.alpha) +
                                     static_cast<long double>(tail) - 1.0L);
    return out;
}

} // namespace

double probe_mass_defect(double beta, std::int64_t depth, std::int64_t direct_cutoff) {
    return run_recursion(beta, depth, direct_cutoff, depth / 2, depth).defect;
}

StepLaw calibrate(const CalibrationOptions& opts) {
    if (opts.cutoff < 100000)
        throw CalibrationFailed("cutoff must be >= 1e5");
    if (opts.search_depth < 4096 || opts.search_depth > opts.cutoff)
        throw CalibrationFailed("search_depth out of range");

    const std::int64_t fit_lo = opts.search_depth / 2;
    const std::int64_t fit_hi = opts.search_depth;

    auto defect_at = [&](double beta) {
        return run_recursion(beta, opts.search_depth, opts.direct_cutoff, fit_lo, fit_hi).defect;
    };

    // bracket a sign change of the mass defect over [beta_lo, beta_hi]
    double lo = opts.beta_lo, hi = opts.beta_hi;
    double flo = defect_at(lo), fhi = defect_at(hi);
    bool bracketed = flo * fhi <= 0.0;
    double best_x = std::fabs(flo) <= std::fabs(fhi) ? lo : hi;
    double best_f = std::min(std::fabs(flo), std::fabs(fhi));
    if (!bracketed) {
        const int grid = 16;
        double prev_x = lo, prev_f = flo;
        for (int i = 1; i <= grid; ++i) {
            const double x = opts.beta_lo + (opts.beta_hi - opts.beta_lo) * i / grid;
            const double f = defect_at(x);
            if (std::fabs(f) < best_f) {
                best_f = std::fabs(f);
                best_x = x;
            }
            if (prev_f * f <= 0.0) {
                lo = prev_x;
                hi = x;
                flo = prev_f;
                fhi = f;
                bracketed = true;
                break;
            }
            prev_x = x;
            prev_f = f;
        }
    }

    double beta_star;
    if (bracketed && flo != 0.0 && fhi != 0.0 && lo < hi) {
        boost::math::tools::eps_tolerance<double> tol(46);
        std::uintmax_t max_iter = 200;
        auto r = boost::math::tools::toms748_solve(defect_at, lo, hi, flo, fhi, tol, max_iter);
        beta_star = 0.5 * (r.first + r.second);
    } else if (bracketed) {
        beta_star = flo == 0.0 ? lo : hi;
    } else if (best_f < opts.mass_tolerance) {
        // defect below tolerance across the whole bracket: the family is
        // critical to working precision everywhere, take the flattest point
        beta_star = best_x;
    } else {
        throw CalibrationFailed("mass defect does not change sign over the beta bracket");
    }

    Recursion fin = run_recursion(beta_star, opts.cutoff, opts.direct_cutoff, fit_lo, fit_hi);
    if (fin.min_neg < -opts.tol) {
        std::ostringstream msg;
        msg << "solved nu(-" << fin.min_neg_j << ") = " << fin.min_neg
            << " is negative beyond tolerance";
        throw CalibrationFailed(msg.str());
    }
    // the per-l rejection samplers rely on nu(-j) decreasing up to the
    // deep-tail noise floor
    for (std::size_t j = 1; j < fin.neg.size(); ++j) {
        if (fin.neg[j] > fin.neg[j - 1] * 1.001 || fin.neg[j] <= 0.0)
            throw CalibrationFailed("negative side is not decreasing within tolerance");
    }

    StepLaw law;
    law.beta_ = beta_star;
    law.alpha_ = fin.alpha;
    law.p_q_ = fin.alpha * (1.0 - beta_star);
    law.direct_cutoff_ = opts.direct_cutoff;
    law.neg_ = std::move(fin.neg);
    law.tail_c2_ = fin.tail_c2;
    law.tail_c3_ = fin.tail_c3;
    law.tail_c4_ = fin.tail_c4;
    law.pos_.resize(static_cast<std::size_t>(opts.pos_cutoff) + 1);
    for (std::int64_t k = 0; k <= opts.pos_cutoff; ++k)
        law.pos_[static_cast<std::size_t>(k)] = law.pos_formula(k);
    law.neg_mass_ = fin.neg_mass_table + law.neg_tail_mass(opts.cutoff);
    law.mass_defect_ = law.alpha_ + law.neg_mass_ - 1.0;
    law.c_q_ = 2.0 / law.nu_neg(1);

    if (std::fabs(law.mass_defect_) > opts.mass_tolerance)
        throw CalibrationFailed("calibrated mass defect exceeds tolerance");
    return law;
}

double StepLaw::pos_tail_mass(std::int64_t K) const {
    // rational part telescopes; geometric part is a closed form
    const double rational = alpha_ * (1.0 - beta_) / static_cast<double>(K + 2);
    const double geometric = alpha_ * beta_ * std::exp2(-static_cast<double>(K + 1));
    return rational + geometric;
}

double StepLaw::neg_tail_mass(std::int64_t J) const {
    return tail_c2_ * zeta_tail(2, J) + tail_c3_ * zeta_tail(3, J) + tail_c4_ * zeta_tail(4, J);
}

double StepLaw::positive_weighted_sum(std::int64_t l, std::int64_t direct_cutoff) const {
    const HarmonicTable& h = harmonic_table();
    KahanSum acc;
    for (std::int64_t k = 0; k < direct_cutoff; ++k) acc.add(nu_pos(k) * h(l + k));
    acc.add(alpha_ * (1.0 - beta_) * tail_sum_pos_h(static_cast<double>(l), direct_cutoff));
    // geometric part beyond the direct horizon (zero in double for horizons > ~1080)
    if (direct_cutoff < 1100 && beta_ > 0.0) {
        KahanSum geo;
        for (std::int64_t k = direct_cutoff; k < 1100; ++k)
            geo.add(alpha_ * beta_ * std::exp2(-static_cast<double>(k + 1)) * h(l + k));
        acc.add(geo.value());
    }
    return acc.value();
}

double StepLaw::harmonicity_residual(std::int64_t l, std::int64_t direct_cutoff) const {
    const HarmonicTable& h = harmonic_table();
    KahanSum acc;
    acc.add(positive_weighted_sum(l, direct_cutoff));
    for (std::int64_t j = 1; j <= l - 1 && j <= neg_cutoff(); ++j)
        acc.add(nu_neg(j) * h(l - j));
    return std::fabs(acc.value() - h(l));
}

double StepLaw::kernel_conditioned_newface(std::int64_t l, std::int64_t k) const {
    if (l < 1) throw InvalidPerimeter("conditioned kernel requires l >= 1");
    if (k < 1) return 0.0;
    return nu_pos(k - 1) * h_up(l + k - 1) / h_up(l);
}

double StepLaw::kernel_conditioned_glue(std::int64_t l, std::int64_t j) const {
    if (l < 1) throw InvalidPerimeter("conditioned kernel requires l >= 1");
    if (j < 0 || j > l - 2) return 0.0;
    return 0.5 * nu_neg(j + 1) * h_up(l - j - 1) / h_up(l);
}

double StepLaw::kernel_conditioned_mass(std::int64_t l) const {
    if (l < 1) throw InvalidPerimeter("conditioned kernel requires l >= 1");
    const HarmonicTable& h = harmonic_table();
    KahanSum acc;
    acc.add(positive_weighted_sum(l, direct_cutoff_));
    for (std::int64_t j = 0; j <= l - 2; ++j) acc.add(nu_neg(j + 1) * h(l - j - 1));
    return acc.value() / h(l);
}

double StepLaw::kernel_halfplane_newface(std::int64_t k) const {
    return k >= 1 ? nu_pos(k - 1) : 0.0;
}

double StepLaw::kernel_halfplane_glue(std::int64_t j) const {
    return j >= 0 ? 0.5 * nu_neg(j + 1) : 0.0;
}

double StepLaw::kernel_finite_newface(std::int64_t l, std::int64_t k) const {
    if (l < 1) throw InvalidPerimeter("finite kernel requires l >= 1");
    if (k < 1) return 0.0;
    return nu_pos(k - 1) * nu_neg(l + k) / nu_neg(l + 1);
}

double StepLaw::kernel_finite_split(std::int64_t l, std::int64_t j) const {
    if (l < 1) throw InvalidPerimeter("finite kernel requires l >= 1");
    if (j < 0 || j > l - 1) return 0.0;
    return nu_neg(j + 1) * nu_neg(l - j) / (2.0 * nu_neg(l + 1));
}

double StepLaw::kernel_finite_newface_mass(std::int64_t l) const {
    if (l < 1) throw InvalidPerimeter("finite kernel requires l >= 1");
    const std::int64_t K = 65536;
    KahanSum acc;
    for (std::int64_t k = 1; k <= K; ++k) acc.add(nu_pos(k - 1) * nu_neg(l + k));
    // power-law remainder beyond the direct horizon
    auto F = [this, l](double x) {
        const double rational = alpha_ * (1.0 - beta_) / (x * (x + 1.0));
        const double u = 1.0 / (static_cast<double>(l) + x);
        return rational * (tail_c2_ + u * (tail_c3_ + u * tail_c4_)) * u * u;
    };
    acc.add(detail::tail_integral_midpoint(F, K + 1));
    return acc.value() / nu_neg(l + 1);
}

double StepLaw::kernel_finite_split_mass(std::int64_t l) const {
    if (l < 1) throw InvalidPerimeter("finite kernel requires l >= 1");
    KahanSum acc;
    for (std::int64_t j = 0; j <= l - 1; ++j) acc.add(nu_neg(j + 1) * nu_neg(l - j));
    return acc.value() / (2.0 * nu_neg(l + 1));
}

double StepLaw::kernel_finite_mass(std::int64_t l) const {
    return kernel_finite_newface_mass(l) + kernel_finite_split_mass(l);
}

ValidationReport validate(const StepLaw& law, std::int64_t L_check, double mass_tol,
                          double harm_tol) {
    ValidationReport rep;
    const std::int64_t J = law.neg_cutoff();

    // independent mass recomputation
    KahanSum mass;
    mass.add(law.pos_mass());
    for (std::int64_t j = 1; j <= J; ++j) mass.add(law.nu_neg(j));
    mass.add(law.neg_tail_mass(J));
    rep.mass_defect = mass.value() - 1.0;

    // harmonicity residuals with a wider direct horizon than calibration used
    rep.max_harmonicity_residual = 0.0;
    for (std::int64_t l = 1; l <= L_check; ++l) {
        const double r = law.harmonicity_residual(l, 8192);
        if (r > rep.max_harmonicity_residual) {
            rep.max_harmonicity_residual = r;
            rep.worst_residual_l = l;
        }
    }

    // tail constants: fit  k^2 nu = a + b/k  over the outer decade
    auto fit_constant = [](auto value_at, std::int64_t lo, std::int64_t hi) {
        double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
        for (std::int64_t k = lo; k <= hi; ++k) {
            const double x = 1.0 / static_cast<double>(k);
            const double y =
                value_at(k) * static_cast<double>(k) * static_cast<double>(k);
            s00 += 1.0;
            s01 += x;
            s11 += x * x;
            r0 += y;
            r1 += x * y;
        }
        return (r0 * s11 - r1 * s01) / (s00 * s11 - s01 * s01);
    };
    rep.pos_tail_constant =
        fit_constant([&](std::int64_t k) { return law.nu_pos(k); }, J / 10, J);
    rep.neg_tail_constant =
        fit_constant([&](std::int64_t k) { return law.nu_neg(k); }, J / 10, J);
    rep.tail_symmetry =
        std::fabs(rep.pos_tail_constant - rep.neg_tail_constant) / law.p_q();

    // Hill-type exponent: log-log slope over [1e3, J] on a geometric grid
    auto tail_exponent = [&](auto value_at) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double g = 1000.0; g <= static_cast<double>(J); g *= 1.05) {
            const auto k = static_cast<std::int64_t>(g);
            const double x = std::log(static_cast<double>(k));
            const double y = std::log(value_at(k));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    rep.pos_tail_exponent = tail_exponent([&](std::int64_t k) { return law.nu_pos(k); });
    rep.neg_tail_exponent = tail_exponent([&](std::int64_t k) { return law.nu_neg(k); });

    rep.c_q = law.c_q();
    rep.min_neg_value = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 1; j <= J; ++j)
        rep.min_neg_value = std::min(rep.min_neg_value, law.nu_neg(j));

    // symmetric partial sum of k nu(k): centring diagnostic
    KahanSum pv;
    for (std::int64_t k = 1; k <= std::min(J, law.pos_cutoff()); ++k)
        pv.add(static_cast<double>(k) * (law.nu_pos(k) - law.nu_neg(k)));
    rep.pv_mean = pv.value();

    rep.mass_ok = std::fabs(rep.mass_defect) < mass_tol;
    rep.harmonicity_ok = rep.max_harmonicity_residual < harm_tol;
    rep.tails_ok = std::fabs(rep.pos_tail_exponent - 2.0) < 0.05 &&
                   std::fabs(rep.neg_tail_exponent - 2.0) < 0.05 && rep.tail_symmetry < 0.05;
    rep.positivity_ok = rep.min_neg_value >= 0.0;
    rep.pass = rep.mass_ok && rep.harmonicity_ok && rep.tails_ok && rep.positivity_ok;
    return rep;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "mass_defect=" << mass_defect << " (" << (mass_ok ? "ok" : "FAIL") << ")"
       << " max_harm_residual=" << max_harmonicity_residual << "@l=" << worst_residual_l << " ("
       << (harmonicity_ok ? "ok" : "FAIL") << ")"
       << " tail_exponents=(" << pos_tail_exponent << "," << neg_tail_exponent << ")"
       << " tail_symmetry=" << tail_symmetry << " (" << (tails_ok ? "ok" : "FAIL") << ")"
       << " c_q=" << c_q << " min_neg=" << min_neg_value << " ("
       << (positivity_ok ? "ok" : "FAIL") << ")"
       << " pv_mean=" << pv_mean;
    return os.str();
}

} // namespace peellab
