#pragma once

#include <cmath>
#include <complex>

#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"

namespace cvkernel::special {

constexpr int kGammaCoeffMaxR = 64;
constexpr int kHypgMaxN = 32;
constexpr int kLaguerreMaxN = 64;

/// Coefficient gamma_{r,j} of the Gaussian-polynomial integral: zero unless
/// r and j share parity, else r! / (2^r ((r-j)/2)! j!).
inline double gamma_coeff(int r, int j) {
    if (r < 0 || r > kGammaCoeffMaxR) throw RangeError("gamma_coeff: r out of [0,64]");
    if (j < 0 || j > r) throw RangeError("gamma_coeff: j out of [0,r]");
    if (((r - j) & 1) != 0) return 0.0;
    const int h = (r - j) / 2;
    if (r <= 20) return factorial(r) / (std::ldexp(1.0, r) * factorial(h) * factorial(j));
    return std::exp(log_factorial(r) - r * M_LN2 - log_factorial(h) - log_factorial(j));
}

/// Integral of exp(-a x^2 + b x) x^r over the real line, Re(a) > 0.
/// Principal branch for the half-integer power of a.
inline cxd gaussian_poly_integral(int r, cxd a, cxd b) {
    if (r < 0 || r > kGammaCoeffMaxR) throw RangeError("gaussian_poly_integral: r out of [0,64]");
    require_finite(a, "gaussian_poly_integral a");
    require_finite(b, "gaussian_poly_integral b");
    if (a.real() <= 0.0) throw DomainError("gaussian_poly_integral: Re(a) <= 0, integral diverges");

    const cxd sqrt_a = std::sqrt(a);
    const cxd w = b / sqrt_a;
    cxd poly{0.0, 0.0};
    cxd wp{1.0, 0.0};
    for (int j = 0; j <= r; ++j) {
        const double g = gamma_coeff(r, j);
        if (g != 0.0) poly += g * wp;
        wp *= w;
    }
    const cxd a_pow = std::pow(a, -0.5 * (r + 1));
    return std::sqrt(M_PI) * a_pow * std::exp(b * b / (4.0 * a)) * poly;
}

/// 1F1(b+n; b; zeta) for nonnegative integer n: exp(zeta) times a degree-n
/// polynomial. Used as an independent oracle for gaussian_poly_integral.
inline cxd confluent_hypergeometric_poly(int n, double b, cxd zeta) {
    if (n < 0 || n > kHypgMaxN) throw RangeError("confluent_hypergeometric_poly: n out of [0,32]");
    if (!(b > 0.0)) throw RangeError("confluent_hypergeometric_poly: b must be positive");
    require_finite(zeta, "confluent_hypergeometric_poly zeta");
    cxd sum{0.0, 0.0};
    cxd zp{1.0, 0.0};
    for (int j = 0; j <= n; ++j) {
        sum += binomial(n, j) * zp / pochhammer(b, j);
        zp *= zeta;
    }
    return std::exp(zeta) * sum;
}

/// Laguerre polynomial L_n(x) by the stable three-term recurrence.
inline double laguerre(int n, double x) {
    if (n < 0 || n > kLaguerreMaxN) throw RangeError("laguerre: n out of [0,64]");
    if (x < 0.0) throw RangeError("laguerre: x must be nonnegative");
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

} // namespace cvkernel::special
