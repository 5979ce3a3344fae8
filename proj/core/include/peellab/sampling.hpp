#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <unordered_map>
#include <vector>

#include "peellab/rng.hpp"
#include "peellab/step_law.hpp"

namespace peellab {

// Walker alias table over indices 0..n-1 with arbitrary non-negative weights.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    std::int64_t sample(RngStream& rng) const {
        const double u = rng.uniform01() * static_cast<double>(n_);
        auto i = static_cast<std::int64_t>(u);
        if (i >= n_) i = n_ - 1;
        return (u - static_cast<double>(i)) < prob_[static_cast<std::size_t>(i)]
                   ? i
                   : alias_[static_cast<std::size_t>(i)];
    }

    double total_mass() const { return total_; }
    bool empty() const { return n_ == 0; }

private:
    std::int64_t n_ = 0;
    double total_ = 0.0;
    std::vector<double> prob_;
    std::vector<std::int32_t> alias_;
};

// Exact sampler for the step distribution nu: alias table over the stored
// range, closed-form inversion for the positive rational tail, descriptor
// rejection for the negative tail.
class NuSampler {
public:
    explicit NuSampler(const StepLaw& law);

    // step s ~ nu on Z
    std::int64_t sample(RngStream& rng) const;
    // k ~ nu restricted to k >= 0 (normalized by the positive mass)
    std::int64_t sample_pos(RngStream& rng) const;
    // j ~ nu(-.) restricted to j >= 1 (normalized by the negative mass)
    std::int64_t sample_neg(RngStream& rng) const;

    const StepLaw& law() const { return *law_; }

private:
    std::int64_t sample_pos_tail(RngStream& rng) const; // k > pos cutoff
    std::int64_t sample_neg_tail(RngStream& rng) const; // j > neg cutoff

    const StepLaw* law_;
    std::int64_t K_, J_;        // stored cutoffs
    AliasTable core_;           // idx 0..J-1: s=-J..-1; J..J+K: s=0..K; then 2 tail slots
    AliasTable pos_only_;       // idx 0..K: k, idx K+1: tail slot
    AliasTable neg_only_;       // idx 0..J-1: j=idx+1, idx J: tail slot
    double neg_tail_env_ = 0.0; // envelope sup of (c2+c3/j+c4/j^2)(1+1/j)
};

// Sampler for the h-transformed (infinite map) kernel at half-perimeter l.
// Small l use cached alias tables over the full event range plus an exact
// tail slot; large l use rejection against nu with the h-ratio, with a
// sqrt-envelope boost component covering steps beyond l.
class ConditionedSampler {
public:
    ConditionedSampler(const StepLaw& law, const NuSampler& nu,
                       std::int64_t table_threshold = 2048, std::size_t cache_capacity = 96);

    PeelEvent sample(std::int64_t l, RngStream& rng);

    std::int64_t table_threshold() const { return table_threshold_; }

private:
    struct Table {
        std::int64_t l = 0;
        std::int64_t K = 0; // NewFace half-degrees tabulated up to K
        AliasTable alias;   // idx 0..l-2: glue j; l-1..l-2+K: NewFace k; last: pos tail
    };

    const Table& table_for(std::int64_t l);
    PeelEvent sample_from_table(const Table& t, RngStream& rng) const;
    PeelEvent sample_large(std::int64_t l, RngStream& rng) const;
    std::int64_t sample_table_tail(std::int64_t l, std::int64_t K, RngStream& rng) const;

    const StepLaw* law_;
    const NuSampler* nu_;
    std::int64_t table_threshold_;
    std::size_t cache_capacity_;
    std::list<Table> lru_;
    std::unordered_map<std::int64_t, std::list<Table>::iterator> index_;
};

// Sampler for the finite (Boltzmann) map kernel at half-perimeter m.
class FiniteSampler {
public:
    FiniteSampler(const StepLaw& law, const NuSampler& nu, std::int64_t table_threshold = 256);

    FiniteEvent sample(std::int64_t m, RngStream& rng);

private:
    struct Table {
        std::int64_t K = 0; // NewFace half-degrees tabulated up to K
        AliasTable alias;   // idx 0..m-1: split j; m..m-1+K: NewFace k; last: NF tail
    };

    const Table& table_for(std::int64_t m);
    double split_mass(std::int64_t m);
    std::int64_t sample_nf_tail(std::int64_t m, std::int64_t K, RngStream& rng) const;

    const StepLaw* law_;
    const NuSampler* nu_;
    std::int64_t table_threshold_;
    std::vector<std::unique_ptr<Table>> tables_; // index m <= table_threshold
    std::unordered_map<std::int64_t, double> split_mass_cache_;
};

double sample_exponential(double rate, RngStream& rng);

} // namespace peellab
