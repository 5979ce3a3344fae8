#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "peellab/harmonic.hpp"

namespace peellab {

// One peeling transition. NewFace carries the half-degree k >= 1 of the
// discovered face; GlueLeft/GlueRight carry the half-perimeter j >= 0 of the
// finite hole created by the identification.
struct PeelEvent {
    enum class Kind : std::uint8_t { NewFace, GlueLeft, GlueRight };
    Kind kind;
    std::int64_t value;

    std::int64_t perimeter_step() const {
        return kind == Kind::NewFace ? value - 1 : -(value + 1);
    }
};

// Event of the finite-map (Boltzmann) kernel: either a new face of
// half-degree k, or a split of the hole into two holes (j, l-1-j).
struct FiniteEvent {
    enum class Kind : std::uint8_t { NewFace, Split };
    Kind kind;
    std::int64_t value; // k for NewFace, j for Split (other part is l-1-j)
};

struct CalibrationOptions {
    double beta_lo = 0.0;
    double beta_hi = 0.9;
    std::int64_t cutoff = 100000;      // stored table depth of the negative side
    std::int64_t pos_cutoff = 65536;   // stored table depth of the positive side
    double tol = 1e-9;                 // negativity tolerance for solved nu(-j)
    std::int64_t direct_cutoff = 4096; // direct terms in positive sums before the analytic tail
    std::int64_t search_depth = 16384; // negative depth used inside the beta root search
    double mass_tolerance = 1e-8;
    double harmonicity_tolerance = 1e-8;
};

// The calibrated step distribution nu on Z together with its derived
// constants. The positive side is the closed-form family
//   nu(k) = alpha * ((1-beta)/((k+1)(k+2)) + beta * 2^{-k-1}),   k >= 0,
// the negative side is solved from nu-harmonicity of h and stored as a table
// up to neg_cutoff with the fitted power-tail descriptor
//   nu(-j) ~ (c2 + c3/j + c4/j^2) / j^2   beyond the table.
class StepLaw {
public:
    StepLaw() = default; // empty; fill via calibrate(), load() or deserialize()

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double p_q() const { return p_q_; } // tail constant alpha*(1-beta)
    double c_q() const { return c_q_; } // 2/nu(-1), W^(0) = 1 convention
    double mass_defect() const { return mass_defect_; }
    double pos_mass() const { return alpha_; } // exact: the family telescopes
    double neg_mass() const { return neg_mass_; }

    std::int64_t pos_cutoff() const { return static_cast<std::int64_t>(pos_.size()) - 1; }
    std::int64_t neg_cutoff() const { return static_cast<std::int64_t>(neg_.size()); }
    double neg_tail_c2() const { return tail_c2_; }
    double neg_tail_c3() const { return tail_c3_; }
    double neg_tail_c4() const { return tail_c4_; }

    // nu(k) for k >= 0
    double nu_pos(std::int64_t k) const {
        if (k <= pos_cutoff()) return pos_[static_cast<std::size_t>(k)];
        return pos_formula(k);
    }

    // nu(-j) for j >= 1
    double nu_neg(std::int64_t j) const {
        if (j <= neg_cutoff()) return neg_[static_cast<std::size_t>(j - 1)];
        return neg_descriptor(j);
    }

    double nu(std::int64_t s) const { return s >= 0 ? nu_pos(s) : nu_neg(-s); }

    // closed-form family value, any k >= 0
    double pos_formula(std::int64_t k) const {
        const double kk = static_cast<double>(k);
        return alpha_ * ((1.0 - beta_) / ((kk + 1.0) * (kk + 2.0)) +
                         beta_ * std::exp2(-kk - 1.0));
    }

    // descriptor value beyond the stored negative table
    double neg_descriptor(std::int64_t j) const {
        const double x = 1.0 / static_cast<double>(j);
        return (tail_c2_ + x * (tail_c3_ + x * tail_c4_)) * x * x;
    }

    // sum_{k > K} nu(k); exact telescoping for the rational part
    double pos_tail_mass(std::int64_t K) const;
    // sum_{j > J} nu(-j) from the descriptor (requires J >= descriptor fit window)
    double neg_tail_mass(std::int64_t J) const;

    // ---- conditioned (infinite-map) kernel -------------------------------
    // P(NewFace(k)) = nu(k-1) h(l+k-1)/h(l),  k >= 1
    // P(GlueLeft(j)) = P(GlueRight(j)) = nu(-j-1) h(l-j-1) / (2 h(l)),  0 <= j <= l-2
    double kernel_conditioned_newface(std::int64_t l, std::int64_t k) const;
    double kernel_conditioned_glue(std::int64_t l, std::int64_t j) const; // one side
    double kernel_conditioned_mass(std::int64_t l) const;

    // ---- half-plane kernel ------------------------------------------------
    double kernel_halfplane_newface(std::int64_t k) const; // nu(k-1)
    double kernel_halfplane_glue(std::int64_t j) const;    // nu(-j-1)/2, one side

    // ---- finite-map kernel (Tutte form) ------------------------------------
    // P(NewFace(k)) = nu(k-1) nu(-l-k) / nu(-l-1)
    // P(Split(j, l-1-j)) = nu(-j-1) nu(-(l-j)) / (2 nu(-l-1)),  0 <= j <= l-1
    double kernel_finite_newface(std::int64_t l, std::int64_t k) const;
    double kernel_finite_split(std::int64_t l, std::int64_t j) const;
    double kernel_finite_newface_mass(std::int64_t l) const;
    double kernel_finite_split_mass(std::int64_t l) const;
    double kernel_finite_mass(std::int64_t l) const;

    // sum_{k >= 0} nu(k) h(l+k), direct terms to `direct_cutoff` then the
    // analytic tail; the workhorse behind calibration and kernel masses
    double positive_weighted_sum(std::int64_t l, std::int64_t direct_cutoff = 4096) const;

    // |sum_k nu(k) h(l+k) - h(l)|, negative side from the stored table
    double harmonicity_residual(std::int64_t l, std::int64_t direct_cutoff = 8192) const;

    // FNV-1a over the serialized representation, computed once per law
    std::uint64_t fingerprint() const;
    std::string fingerprint_hex() const;

    // versioned text round-trip (bit-exact)
    void save(const std::string& path) const;
    static StepLaw load(const std::string& path);
    std::string serialize() const;
    static StepLaw deserialize(const std::string& text);

    friend StepLaw calibrate(const CalibrationOptions&);

private:
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double p_q_ = 0.0;
    double c_q_ = 0.0;
    double mass_defect_ = 0.0;
    double neg_mass_ = 0.0;
    double tail_c2_ = 0.0;
    double tail_c3_ = 0.0;
    double tail_c4_ = 0.0;
    std::int64_t direct_cutoff_ = 4096;
    std::vector<double> pos_; // pos_[k] = nu(k)
    std::vector<double> neg_; // neg_[j-1] = nu(-j)
    mutable std::uint64_t fingerprint_ = 0; // lazily cached

};

struct ValidationReport {
    double mass_defect = 0.0;
    double max_harmonicity_residual = 0.0;
    std::int64_t worst_residual_l = 0;
    double pos_tail_constant = 0.0;  // fit of k^2 nu(k) at the table edge
    double neg_tail_constant = 0.0;  // fit of j^2 nu(-j)
    double tail_symmetry = 0.0;      // |pos - neg| / p_q
    double pos_tail_exponent = 0.0;  // Hill-type log-log slope on [1e3, cutoff]
    double neg_tail_exponent = 0.0;
    double c_q = 0.0;
    double min_neg_value = 0.0;
    double pv_mean = 0.0;            // symmetric partial sum of k nu(k); should be ~0
    bool mass_ok = false;
    bool harmonicity_ok = false;
    bool tails_ok = false;
    bool positivity_ok = false;
    bool pass = false;

    std::string summary() const;
};

StepLaw calibrate(const CalibrationOptions& opts = {});
ValidationReport validate(const StepLaw& law, std::int64_t L_check = 2000,
                          double mass_tol = 1e-8, double harm_tol = 1e-8);

// Mass defect of the harmonicity-solved law at a fixed shape parameter;
// exposes the root-search objective for diagnostics and tests.
double probe_mass_defect(double beta, std::int64_t depth = 16384,
                         std::int64_t direct_cutoff = 4096);

} // namespace peellab
