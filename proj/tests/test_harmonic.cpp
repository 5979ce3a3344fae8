#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "peellab/detail/numeric.hpp"
#include "peellab/harmonic.hpp"

using namespace peellab;

namespace {

// exact rational 2l * 2^{-2l} * binom(2l, l) via big integers
double h_exact_rational(std::int64_t l) {
    using boost::multiprecision::cpp_int;
    cpp_int binom = 1;
    for (std::int64_t i = 1; i <= l; ++i) {
        binom *= (l + i);
        binom /= i;
    }
    const cpp_int num = binom * 2 * l;
    const cpp_int den = cpp_int(1) << (2 * l);
    // num/den with 80 bits of headroom
    const cpp_int scaled = (num << 80) / den;
    return std::ldexp(static_cast<double>(scaled), -80);
}

} // namespace

TEST_CASE("h vanishes on non-positive arguments and starts at 1") {
    CHECK(h_up(0) == 0.0);
    CHECK(h_up(-5) == 0.0);
    CHECK(h_up(1) == 1.0);
    CHECK(h_up(2) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(h_up(3) == doctest::Approx(1.875).epsilon(1e-15));
}

TEST_CASE("table matches the exact rational values below the switch") {
    const HarmonicTable& t = harmonic_table();
    for (std::int64_t l : {std::int64_t{1}, std::int64_t{2}, std::int64_t{7}, std::int64_t{50},
                           std::int64_t{333}, std::int64_t{1000}, std::int64_t{4096},
                           std::int64_t{10000}, t.asymptotic_switch()}) {
        const double exact = h_exact_rational(l);
        CHECK(std::fabs(t(l) / exact - 1.0) < 1e-12);
    }
}

TEST_CASE("asymptotic branch is continuous across the switch") {
    const HarmonicTable& t = harmonic_table();
    const std::int64_t s = t.asymptotic_switch();
    CHECK(std::fabs(t(s) / HarmonicTable::asymptotic(static_cast<double>(s)) - 1.0) < 1e-13);
    CHECK(std::fabs(t(s + 1) / h_exact_rational(s + 1) - 1.0) < 1e-12);
}

TEST_CASE("strictly increasing and sqrt-normalized limit") {
    double prev = 0.0;
    for (std::int64_t l = 1; l <= 3000; ++l) {
        CHECK(h_up(l) > prev);
        prev = h_up(l);
    }
    const double ratio = h_up(1000000) / (2.0 * std::sqrt(1000000.0 / M_PI));
    CHECK(std::fabs(ratio - 1.0) < 1e-4);
    // classical two-sided bounds used by the samplers
    for (std::int64_t l = 1; l <= 5000; ++l) {
        const double upper = 2.0 * std::sqrt(static_cast<double>(l) / M_PI);
        CHECK(h_up(l) <= upper);
        CHECK(h_up(l) >= upper * (1.0 - 1.0 / (8.0 * static_cast<double>(l))));
    }
}

TEST_CASE("tail quadrature agrees with brute-force summation") {
    for (const double l : {0.0, 1.0, 7.0, 100.0, 3000.0}) {
        detail::KahanSum brute;
        const std::int64_t far = 20000000;
        for (std::int64_t k = 4096; k < far; ++k)
            brute.add(HarmonicTable::asymptotic(l + static_cast<double>(k)) /
                      ((static_cast<double>(k) + 1.0) * (static_cast<double>(k) + 2.0)));
        const double rest = detail::tail_sum_pos_h(l, far);
        const double quad = detail::tail_sum_pos_h(l, 4096);
        CHECK(std::fabs(quad - (brute.value() + rest)) < 1e-13 * quad);
    }
}

TEST_CASE("zeta tails match direct sums") {
    for (const double s : {2.0, 3.0, 4.0}) {
        for (const std::int64_t J : {64, 1000, 10000}) {
            detail::KahanSum direct;
            for (std::int64_t j = J + 1; j <= J + 8000000; ++j)
                direct.add(std::pow(static_cast<double>(j), -s));
            // remaining mass beyond the brute window
            const double rest = detail::zeta_tail(s, J + 8000000);
            CHECK(std::fabs(detail::zeta_tail(s, J) - (direct.value() + rest)) <
                  1e-12 * detail::zeta_tail(s, J));
        }
    }
}
