#include "peellab/harmonic.hpp"

#include <cmath>

namespace peellab {

namespace {
constexpr double kTwoOverSqrtPi = 1.1283791670955125738961589031;
}

HarmonicTable::HarmonicTable(std::int64_t l_max, std::int64_t asymptotic_switch)
    : l_max_(l_max), asymptotic_switch_(asymptotic_switch) {
    values_.resize(static_cast<std::size_t>(l_max_) + 1);
    values_[0] = 0.0;
    long double h = 1.0L; // h(1)
    for (std::int64_t l = 1; l <= asymptotic_switch_ && l <= l_max_; ++l) {
        values_[static_cast<std::size_t>(l)] = static_cast<double>(h);
        h *= static_cast<long double>(2 * l + 1) / static_cast<long double>(2 * l);
    }
    for (std::int64_t l = asymptotic_switch_ + 1; l <= l_max_; ++l) {
        values_[static_cast<std::size_t>(l)] = asymptotic(static_cast<double>(l));
    }
}

double HarmonicTable::asymptotic(double l) {
    // central binomial expansion: binom(2l,l) = 4^l/sqrt(pi l) * (1 - 1/(8l) + ...)
    const double x = 1.0 / l;
    const double series =
        1.0 + x * (-1.0 / 8.0 + x * (1.0 / 128.0 + x * (5.0 / 1024.0 + x * (-21.0 / 32768.0))));
    return kTwoOverSqrtPi * std::sqrt(l) * series;
}

const HarmonicTable& harmonic_table() {
    static const HarmonicTable table;
    return table;
}

} // namespace peellab
