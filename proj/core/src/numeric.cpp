#include "peellab/detail/numeric.hpp"

namespace peellab::detail {

namespace {

GaussLegendre build_gl64() {
    constexpr int n = 64;
    GaussLegendre gl{};
    for (int i = 0; i < n / 2; ++i) {
        // Newton iteration from the Chebyshev-angle initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map (-1,1) -> (0,1); keep symmetric pair
        gl.node[i] = 0.5 * (1.0 - x);
        gl.weight[i] = 0.5 * w;
        gl.node[n - 1 - i] = 0.5 * (1.0 + x);
        gl.weight[n - 1 - i] = 0.5 * w;
    }
    return gl;
}

} // namespace

const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre gl = build_gl64();
    return gl;
}

double tail_sum_pos_h(double l, std::int64_t A) {
    return tail_integral_midpoint(
        [l](double x) { return HarmonicTable::asymptotic(l + x) / ((x + 1.0) * (x + 2.0)); }, A);
}

double zeta_tail(double s, std::int64_t J) {
    const double a = static_cast<double>(J) + 0.5;
    const double as = std::pow(a, -s);
    const double a3 = a * a * a;
    return as * a / (s - 1.0) - s * as / (a * 24.0) +
           7.0 * s * (s + 1.0) * (s + 2.0) * as / (a3 * 5760.0) -
           31.0 * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * as / (a3 * a * a * 967680.0);
}

} // namespace peellab::detail
