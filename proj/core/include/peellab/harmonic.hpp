#pragma once

#include <cstdint>
#include <vector>

namespace peellab {

// h(l) = 2l * 2^{-2l} * binom(2l, l) for l >= 1, and 0 on l <= 0.
// Strictly increasing on N, h(l) ~ 2*sqrt(l/pi) with a 1/l expansion.
//
// Values up to `asymptotic_switch` come from the exact ratio recurrence
// h(l+1) = h(l) * (2l+1)/(2l), carried in long double; beyond the switch the
// closed-form asymptotic expansion is accurate to full double precision.
class HarmonicTable {
public:
    explicit HarmonicTable(std::int64_t l_max = (1 << 21),
                           std::int64_t asymptotic_switch = (1 << 14));

    double operator()(std::int64_t l) const {
        if (l <= 0) return 0.0;
        if (l <= l_max_) return values_[static_cast<std::size_t>(l)];
        return asymptotic(l);
    }

    // asymptotic expansion of the closed form, valid for large arguments;
    // takes a real argument so tail quadratures can use it off-lattice
    static double asymptotic(double l);

    std::int64_t l_max() const { return l_max_; }
    std::int64_t asymptotic_switch() const { return asymptotic_switch_; }

private:
    std::int64_t l_max_;
    std::int64_t asymptotic_switch_;
    std::vector<double> values_;
};

// Shared process-wide table (immutable after construction).
const HarmonicTable& harmonic_table();

inline double h_up(std::int64_t l) { return harmonic_table()(l); }

} // namespace peellab
