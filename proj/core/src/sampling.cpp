#include "peellab/sampling.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "peellab/detail/numeric.hpp"
#include "peellab/errors.hpp"

namespace peellab {

using detail::KahanSum;

AliasTable::AliasTable(const std::vector<double>& weights) {
    n_ = static_cast<std::int64_t>(weights.size());
    if (n_ == 0) return;
    KahanSum t;
    for (const double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("alias table weight must be >= 0");
        t.add(w);
    }
    total_ = t.value();
    prob_.assign(weights.size(), 1.0);
    alias_.assign(weights.size(), 0);
    if (total_ <= 0.0) return;

    std::vector<double> scaled(weights.size());
    const double scale = static_cast<double>(n_) / total_;
    for (std::size_t i = 0; i < weights.size(); ++i) scaled[i] = weights[i] * scale;

    std::vector<std::int32_t> small, large;
    small.reserve(weights.size());
    large.reserve(weights.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::int32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::int32_t s = small.back();
        small.pop_back();
        const std::int32_t g = large.back();
        prob_[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
        alias_[static_cast<std::size_t>(s)] = g;
        scaled[static_cast<std::size_t>(g)] =
            (scaled[static_cast<std::size_t>(g)] + scaled[static_cast<std::size_t>(s)]) - 1.0;
        if (scaled[static_cast<std::size_t>(g)] < 1.0) {
            large.pop_back();
            small.push_back(g);
        }
    }
    // leftovers in either list land on probability one
    for (const std::int32_t i : large) prob_[static_cast<std::size_t>(i)] = 1.0;
    for (const std::int32_t i : small) prob_[static_cast<std::size_t>(i)] = 1.0;
}

// ---------------------------------------------------------------------------
// NuSampler

NuSampler::NuSampler(const StepLaw& law) : law_(&law) {
    K_ = law.pos_cutoff();
    J_ = law.neg_cutoff();

    std::vector<double> w(static_cast<std::size_t>(J_ + K_ + 3));
    for (std::int64_t j = 1; j <= J_; ++j) w[static_cast<std::size_t>(J_ - j)] = law.nu_neg(j);
    for (std::int64_t k = 0; k <= K_; ++k) w[static_cast<std::size_t>(J_ + k)] = law.nu_pos(k);
    w[static_cast<std::size_t>(J_ + K_ + 1)] = law.pos_tail_mass(K_);
    w[static_cast<std::size_t>(J_ + K_ + 2)] = law.neg_tail_mass(J_);
    core_ = AliasTable(w);

    std::vector<double> wp(static_cast<std::size_t>(K_ + 2));
    for (std::int64_t k = 0; k <= K_; ++k) wp[static_cast<std::size_t>(k)] = law.nu_pos(k);
    wp[static_cast<std::size_t>(K_ + 1)] = law.pos_tail_mass(K_);
    pos_only_ = AliasTable(wp);

    std::vector<double> wn(static_cast<std::size_t>(J_ + 1));
    for (std::int64_t j = 1; j <= J_; ++j) wn[static_cast<std::size_t>(j - 1)] = law.nu_neg(j);
    wn[static_cast<std::size_t>(J_)] = law.neg_tail_mass(J_);
    neg_only_ = AliasTable(wn);

    // envelope of (c2 + c3 u + c4 u^2)(1 + u) on u in (0, 1/(J+1)]
    auto phi = [&](double u) {
        return (law.neg_tail_c2() + u * (law.neg_tail_c3() + u * law.neg_tail_c4())) * (1.0 + u);
    };
    neg_tail_env_ = std::max(phi(0.0), phi(1.0 / static_cast<double>(J_ + 1))) * (1.0 + 1e-9);
    if (!(neg_tail_env_ > 0.0) || !(phi(1.0 / static_cast<double>(J_ + 1)) > 0.0))
        throw CalibrationFailed("negative tail descriptor is not a positive density");
}

std::int64_t NuSampler::sample_pos_tail(RngStream& rng) const {
    for (;;) {
        const double v = rng.uniform01_open();
        const double x = static_cast<double>(K_ + 2) / v;
        if (x > 9e14) continue; // conditional on the representable range
        return static_cast<std::int64_t>(std::ceil(x)) - 2;
    }
}

std::int64_t NuSampler::sample_neg_tail(RngStream& rng) const {
    const double c2 = law_->neg_tail_c2(), c3 = law_->neg_tail_c3(), c4 = law_->neg_tail_c4();
    for (;;) {
        const double v = rng.uniform01_open();
        const double x = static_cast<double>(J_ + 1) / v;
        if (x > 9e14) continue;
        const auto j = static_cast<std::int64_t>(std::ceil(x)) - 1;
        const double u = 1.0 / static_cast<double>(j);
        const double phi = (c2 + u * (c3 + u * c4)) * (1.0 + u);
        if (rng.uniform01() * neg_tail_env_ <= phi) return j;
    }
}

std::int64_t NuSampler::sample(RngStream& rng) const {
    const std::int64_t idx = core_.sample(rng);
    if (idx <= J_ + K_) return idx - J_;
    if (idx == J_ + K_ + 1) return sample_pos_tail(rng);
    return -sample_neg_tail(rng);
}

std::int64_t NuSampler::sample_pos(RngStream& rng) const {
    const std::int64_t idx = pos_only_.sample(rng);
    return idx <= K_ ? idx : sample_pos_tail(rng);
}

std::int64_t NuSampler::sample_neg(RngStream& rng) const {
    const std::int64_t idx = neg_only_.sample(rng);
    return idx < J_ ? idx + 1 : sample_neg_tail(rng);
}

// ---------------------------------------------------------------------------
// ConditionedSampler

ConditionedSampler::ConditionedSampler(const StepLaw& law, const NuSampler& nu,
                                       std::int64_t table_threshold, std::size_t cache_capacity)
    : law_(&law), nu_(&nu), table_threshold_(table_threshold), cache_capacity_(cache_capacity) {
    if (table_threshold_ < 2) table_threshold_ = 2;
}

const ConditionedSampler::Table& ConditionedSampler::table_for(std::int64_t l) {
    auto it = index_.find(l);
    if (it != index_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        return *it->second;
    }
    Table t;
    t.l = l;
    t.K = std::max<std::int64_t>(2048, 8 * l);
    const double hl = h_up(l);
    std::vector<double> w(static_cast<std::size_t>((l - 1) + t.K + 1));
    for (std::int64_t j = 0; j <= l - 2; ++j)
        w[static_cast<std::size_t>(j)] = law_->nu_neg(j + 1) * h_up(l - j - 1) / hl;
    for (std::int64_t k = 1; k <= t.K; ++k)
        w[static_cast<std::size_t>(l - 1 + k - 1)] = law_->nu_pos(k - 1) * h_up(l + k - 1) / hl;
    w.back() = law_->p_q() * detail::tail_sum_pos_h(static_cast<double>(l), t.K) / hl;
    t.alias = AliasTable(w);

    lru_.push_front(std::move(t));
    index_[l] = lru_.begin();
    if (lru_.size() > cache_capacity_) {
        index_.erase(lru_.back().l);
        lru_.pop_back();
    }
    return lru_.front();
}

// NewFace half-degrees beyond the tabulated range: propose the nu index
// m = k-1 >= K from the x^{-3/2} envelope and reject with the exact h-ratio.
std::int64_t ConditionedSampler::sample_table_tail(std::int64_t l, std::int64_t K,
                                                   RngStream& rng) const {
    const double hl = h_up(l);
    const double abar = law_->p_q();
    const double lk = static_cast<double>(l) * static_cast<double>(K);
    const double bound =
        2.0 * abar * 1.0607 * (1.0 + 0.25 / static_cast<double>(l)) / std::sqrt(lk);
    const double sqrtK = std::sqrt(static_cast<double>(K));
    for (;;) {
        const double v = rng.uniform01_open();
        const double x = static_cast<double>(K) / (v * v);
        if (x > 9e14) continue;
        const auto m = static_cast<std::int64_t>(std::floor(x));
        const double pmf =
            sqrtK * (1.0 / std::sqrt(static_cast<double>(m)) -
                     1.0 / std::sqrt(static_cast<double>(m) + 1.0));
        const double target = law_->nu_pos(m) * h_up(l + m) / hl;
        if (rng.uniform01() * bound * pmf <= target) return m;
    }
}

PeelEvent ConditionedSampler::sample_from_table(const Table& t, RngStream& rng) const {
    const std::int64_t idx = t.alias.sample(rng);
    if (idx <= t.l - 2) {
        const auto kind =
            rng.next_u64() & 1 ? PeelEvent::Kind::GlueLeft : PeelEvent::Kind::GlueRight;
        return {kind, idx};
    }
    const std::int64_t k = idx - (t.l - 1) + 1;
    if (k <= t.K) return {PeelEvent::Kind::NewFace, k};
    return {PeelEvent::Kind::NewFace, sample_table_tail(t.l, t.K, rng) + 1};
}

// Rejection against nu with the exact h-ratio. Steps s <= l are dominated by
// Lambda = h(2l)/h(l); steps s > l by an extra x^{-3/2} boost component.
PeelEvent ConditionedSampler::sample_large(std::int64_t l, RngStream& rng) const {
    const double hl = h_up(l);
    const double lambda = h_up(2 * l) / hl;
    const double ld = static_cast<double>(l);
    const double cb = law_->p_q() * (1.0 + 0.5 / ld) / lambda;
    const double boost_mass = cb * 2.0 * std::sqrt(2.0) / ld;
    const double sqrt2_over_sqrt_l = std::sqrt(2.0 / ld);
    for (;;) {
        std::int64_t s;
        if (rng.uniform01() * (1.0 + boost_mass) < 1.0) {
            s = nu_->sample(rng);
        } else {
            const double v = rng.uniform01_open();
            const double x = ld / (v * v);
            if (x > 9e14) continue;
            s = static_cast<std::int64_t>(std::ceil(x)); // s >= l+1
        }
        if (s <= -l) continue; // h vanishes: zero target
        const double target = law_->nu(s) * h_up(l + s) / hl;
        double q = law_->nu(s);
        if (s > l) {
            const double lo = std::sqrt(static_cast<double>(s) - 1.0);
            const double hi = std::sqrt(static_cast<double>(s));
            q += cb * sqrt2_over_sqrt_l * 2.0 * (1.0 / lo - 1.0 / hi);
        }
        if (rng.uniform01() * lambda * q <= target) {
            if (s >= 0) return {PeelEvent::Kind::NewFace, s + 1};
            const auto kind =
                rng.next_u64() & 1 ? PeelEvent::Kind::GlueLeft : PeelEvent::Kind::GlueRight;
            return {kind, -s - 1};
        }
    }
}

PeelEvent ConditionedSampler::sample(std::int64_t l, RngStream& rng) {
    if (l < 1) throw InvalidPerimeter("conditioned sampling requires l >= 1");
    if (l <= table_threshold_) return sample_from_table(table_for(l), rng);
    return sample_large(l, rng);
}

// ---------------------------------------------------------------------------
// FiniteSampler

FiniteSampler::FiniteSampler(const StepLaw& law, const NuSampler& nu,
                             std::int64_t table_threshold)
    : law_(&law), nu_(&nu), table_threshold_(table_threshold) {
    tables_.resize(static_cast<std::size_t>(table_threshold_) + 1);
}

const FiniteSampler::Table& FiniteSampler::table_for(std::int64_t m) {
    auto& slot = tables_[static_cast<std::size_t>(m)];
    if (slot) return *slot;
    auto t = std::make_unique<Table>();
    t->K = 2048;
    std::vector<double> w(static_cast<std::size_t>(m + t->K + 1));
    for (std::int64_t j = 0; j <= m - 1; ++j)
        w[static_cast<std::size_t>(j)] = law_->kernel_finite_split(m, j);
    for (std::int64_t k = 1; k <= t->K; ++k)
        w[static_cast<std::size_t>(m + k - 1)] = law_->kernel_finite_newface(m, k);
    // NewFace mass beyond the table: direct terms then the power-law remainder
    {
        KahanSum acc;
        const std::int64_t direct_to = 65536;
        for (std::int64_t k = t->K + 1; k <= direct_to; ++k)
            acc.add(law_->kernel_finite_newface(m, k));
        const double abar = law_->p_q();
        const double c2 = law_->neg_tail_c2(), c3 = law_->neg_tail_c3(),
                     c4 = law_->neg_tail_c4();
        auto F = [&](double x) {
            const double u = 1.0 / (static_cast<double>(m) + x);
            return abar / (x * (x + 1.0)) * (c2 + u * (c3 + u * c4)) * u * u;
        };
        acc.add(detail::tail_integral_midpoint(F, direct_to + 1) / law_->nu_neg(m + 1));
        w.back() = acc.value();
    }
    t->alias = AliasTable(w);
    slot = std::move(t);
    return *slot;
}

double FiniteSampler::split_mass(std::int64_t m) {
    auto it = split_mass_cache_.find(m);
    if (it != split_mass_cache_.end()) return it->second;
    const double value = law_->kernel_finite_split_mass(m);
    if (split_mass_cache_.size() > (1u << 20)) split_mass_cache_.clear();
    split_mass_cache_[m] = value;
    return value;
}

// nu(-j) decreases up to ~1e-4 relative numerical noise at the deep table
// end; the rejection envelopes widen by this slack so acceptance stays <= 1
constexpr double kMonotoneSlack = 1.001;

std::int64_t FiniteSampler::sample_nf_tail(std::int64_t m, std::int64_t K,
                                           RngStream& rng) const {
    // propose k > K from the exact rational tail, reject with the nu(-m-k) ratio
    const double top = law_->nu_neg(m + K + 1) * kMonotoneSlack;
    for (;;) {
        const double v = rng.uniform01_open();
        const double x = static_cast<double>(K + 1) / v;
        if (x > 9e14) continue;
        const auto k = static_cast<std::int64_t>(std::ceil(x)) - 1; // k >= K+1
        if (rng.uniform01() * top <= law_->nu_neg(m + k)) return k;
    }
}

FiniteEvent FiniteSampler::sample(std::int64_t m, RngStream& rng) {
    if (m < 1) throw InvalidPerimeter("finite sampling requires l >= 1");
    if (m <= table_threshold_) {
        const Table& t = table_for(m);
        const std::int64_t idx = t.alias.sample(rng);
        if (idx <= m - 1) return {FiniteEvent::Kind::Split, idx};
        const std::int64_t k = idx - m + 1;
        if (k <= t.K) return {FiniteEvent::Kind::NewFace, k};
        return {FiniteEvent::Kind::NewFace, sample_nf_tail(m, t.K, rng)};
    }

    const double ps = split_mass(m);
    if (rng.uniform01() >= ps) {
        // NewFace branch: k-1 ~ nu_pos, accepted with the decreasing nu(-m-k) ratio
        const double top = law_->nu_neg(m + 1) * kMonotoneSlack;
        for (;;) {
            const std::int64_t k = nu_->sample_pos(rng) + 1;
            if (rng.uniform01() * top <= law_->nu_neg(m + k)) return {FiniteEvent::Kind::NewFace, k};
        }
    }
    // Split branch, folded onto i = j+1 <= floor((m+1)/2) by the j <-> m-1-j symmetry
    const std::int64_t i_half = (m + 1) / 2;
    const double top = 2.0 * law_->nu_neg(m + 1 - i_half) * kMonotoneSlack;
    for (;;) {
        const std::int64_t i = nu_->sample_neg(rng);
        if (i > i_half) continue;
        const double fold = (2 * i == m + 1) ? 1.0 : 2.0;
        if (rng.uniform01() * top <= fold * law_->nu_neg(m + 1 - i)) {
            const std::int64_t j = i - 1;
            if (fold == 1.0 || (rng.next_u64() & 1)) return {FiniteEvent::Kind::Split, j};
            return {FiniteEvent::Kind::Split, m - i};
        }
    }
}

double sample_exponential(double rate, RngStream& rng) { return rng.exponential(rate); }

} // namespace peellab
