#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"

namespace cvkernel::quadrature {

using cxl = std::complex<long double>;

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights; // for weight function exp(-x^2)
};

/// Nodes and weights of the n-point Gauss-Hermite rule (weight exp(-x^2)).
/// Newton iteration on the orthonormal Hermite recurrence.
inline GaussHermiteRule gauss_hermite(int n) {
    if (n < 1 || n > 512) throw RangeError("gauss_hermite: n out of [1,512]");
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const long double pim4 = 0.7511255444649424828587030047762276930510L; // pi^{-1/4}
    const int half = (n + 1) / 2;
    long double z = 0.0L;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(static_cast<long double>(2 * n + 1)) -
                1.85575L * std::pow(static_cast<long double>(2 * n + 1), -0.16667L);
        } else if (i == 1) {
            z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
        } else if (i == 2) {
            z = 1.86L * z - 0.86L * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91L * z - 0.91L * rule.nodes[1];
        } else {
            z = 2.0L * z - rule.nodes[i - 2];
        }
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p1 = pim4;
            long double p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0L / (j + 1)) * p2 -
                     std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0L * n) * p2;
            const long double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-18L) break;
        }
        rule.nodes[i] = static_cast<double>(z);
        rule.nodes[n - 1 - i] = -static_cast<double>(z);
        const double w = static_cast<double>(2.0L / (pp * pp));
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n & 1) rule.nodes[half - 1] = 0.0; // enforce exact symmetry
    // nodes come out descending; flip to ascending order
    std::vector<double> xs(rule.nodes.rbegin(), rule.nodes.rend());
    std::vector<double> ws(rule.weights.rbegin(), rule.weights.rend());
    rule.nodes = std::move(xs);
    rule.weights = std::move(ws);
    return rule;
}

namespace detail {

template <typename F>
cxl simpson(const F& f, long double a, long double b, cxl fa, cxl fm, cxl fb, cxl whole,
            long double tol, int depth) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const cxl flm = f(lm), frm = f(rm);
    const cxl left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const cxl right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    const cxl delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0L * tol) return left + right + delta / 15.0L;
    return simpson(f, a, m, fa, flm, fm, left, 0.5L * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5L * tol, depth - 1);
}

template <typename F>
cxl adaptive_panels(const F& f, long double a, long double b, long double tol, int panels,
                    int max_depth) {
    cxl total{0.0L, 0.0L};
    for (int p = 0; p < panels; ++p) {
        const long double pa = a + (b - a) * p / panels;
        const long double pb = a + (b - a) * (p + 1) / panels;
        const long double pm = 0.5L * (pa + pb);
        const cxl fa = f(pa), fm = f(pm), fb = f(pb);
        const cxl whole = (pb - pa) / 6.0L * (fa + 4.0L * fm + fb);
        total += simpson(f, pa, pb, fa, fm, fb, whole, tol / panels, max_depth);
    }
    return total;
}

} // namespace detail

/// Adaptive Simpson quadrature of a complex integrand on [a, b]. The panel
/// pre-split keeps narrow features from being skipped on wide intervals.
inline cxd adaptive_integrate(const std::function<cxd(double)>& f, double a, double b,
                              double tol = 1e-13, int max_depth = 44, int panels = 32) {
    auto fl = [&](long double x) {
        const cxd v = f(static_cast<double>(x));
        return cxl{v.real(), v.imag()};
    };
    const cxl r = detail::adaptive_panels(fl, a, b, tol, panels, max_depth);
    return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

} // namespace cvkernel::quadrature
