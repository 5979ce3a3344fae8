#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "peellab/harmonic.hpp"

namespace peellab::detail {

// Neumaier-compensated accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

struct GaussLegendre {
    std::array<double, 64> node;   // on (0,1)
    std::array<double, 64> weight;
};

// 64-point Gauss-Legendre rule on (0,1), generated once by Newton iteration.
const GaussLegendre& gauss_legendre_64();

// Integrates f over (0,1); f must be smooth there.
template <typename F>
double integral01(F&& f) {
    const GaussLegendre& gl = gauss_legendre_64();
    KahanSum acc;
    for (int i = 0; i < 64; ++i) acc.add(gl.weight[i] * f(gl.node[i]));
    return acc.value();
}

// Sum_{k >= A} f(k) for smooth f with a power-law tail, via the midpoint
// Euler-Maclaurin identity
//   sum_{k>=A} f(k) = int_{a}^inf f + f'(a)/24 + O(f'''),  a = A - 1/2,
// the integral mapped to (0,1) by x = a/w^2, which removes the endpoint
// singularity of the integrand.
template <typename F>
double tail_integral_midpoint(F&& f, std::int64_t A) {
    const double a = static_cast<double>(A) - 0.5;
    const double integral = integral01([&](double w) {
        const double x = a / (w * w);
        return f(x) * 2.0 * a / (w * w * w);
    });
    const double da = a * 1e-6;
    const double fprime = (f(a + da) - f(a - da)) / (2.0 * da);
    return integral + fprime / 24.0;
}

// Sum_{k >= A} h(l + k) / ((k+1)(k+2)) with h the asymptotic closed form of
// the harmonic function. Valid when l + A is large enough for the asymptotic
// series (l >= 0, A >= ~2048).
double tail_sum_pos_h(double l, std::int64_t A);

// Sum_{j > J} j^{-s} for s > 1, J >= 16.
double zeta_tail(double s, std::int64_t J);

} // namespace peellab::detail
