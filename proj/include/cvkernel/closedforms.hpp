#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "cvkernel/engine.hpp"
#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/special.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::closedforms {

/// Displaced Fock inner product <F_alpha|F_beta> from the six-fold nested
/// sum; derivation witness, n <= 8 (alternating terms cancel beyond that).
inline cxd displaced_fock_inner(const std::array<double, 2>& x1, const std::array<double, 2>& x2,
                                int n, double c) {
    if (n < 0 || n > 8) throw RangeError("displaced_fock_inner: n out of [0,8]");
    if (!(c > 0.0)) throw DomainError("displaced_fock_inner: bandwidth must be positive");
    const cxd alpha = c * cxd{x1[0], x1[1]};
    const cxd beta = c * cxd{x2[0], x2[1]};
    const cxd ac = std::conj(alpha);
    const cxd bc = std::conj(beta);
    const cxd u = ac + beta;                 // x-direction linear coefficient
    const cxd v = cxd{0.0, -1.0} * (ac - beta); // y-direction linear coefficient
    const cxd iu{0.0, 1.0};

    KahanSum acc;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
            const cxd left = pow_int(-iu, j) * pow_int(-alpha, n - i - j) /
                             (factorial(i) * factorial(j) * factorial(n - i - j));
            for (int k = 0; k <= n; ++k) {
                for (int l = 0; l <= n - k; ++l) {
                    const cxd right = pow_int(iu, l) * pow_int(-bc, n - k - l) /
                                      (factorial(k) * factorial(l) * factorial(n - k - l));
                    for (int p = (i + k) & 1; p <= i + k; p += 2) {
                        const double gp = special::gamma_coeff(i + k, p);
                        for (int q = (j + l) & 1; q <= j + l; q += 2) {
                            const double gq = special::gamma_coeff(j + l, q);
                            acc.add(left * right * gp * gq * pow_int(u, p) * pow_int(v, q));
                        }
                    }
                }
            }
        }
    }
    return factorial(n) *
           std::exp(-0.5 * (std::norm(alpha) + std::norm(beta)) + ac * beta) * acc.value();
}

/// Production path: k(s^2) = exp(-s^2) L_n(s^2)^2, stable for all admitted n.
inline double displaced_fock_kernel_laguerre(double s2, int n) {
    if (s2 < 0.0) throw DomainError("displaced_fock_kernel_laguerre: s^2 must be nonnegative");
    const double l = special::laguerre(n, s2);
    return std::exp(-s2) * l * l;
}

/// Verbatim reference polynomials for n = 0..8; test fixture only.
inline double table_reference_kernel(double s2, int n) {
    if (n < 0 || n > 8) throw RangeError("table_reference_kernel: n out of [0,8]");
    if (s2 < 0.0) throw DomainError("table_reference_kernel: s^2 must be nonnegative");
    static const std::vector<std::vector<double>> poly = {
        {1},
        {-1, 1},
        {2, -4, 1},
        {-6, 18, -9, 1},
        {24, -96, 72, -16, 1},
        {-120, 600, -600, 200, -25, 1},
        {720, -4320, 5400, -2400, 450, -36, 1},
        {-5040, 35280, -52920, 29400, -7350, 882, -49, 1},
        {40320, -322560, 564480, -376320, 117600, -18816, 1568, -64, 1},
    };
    static const std::vector<double> divisor = {1,      1,        4,         36,
                                                576,    14400,    518400,    25401600,
                                                1625702400};
    double val = 0.0;
    for (int j = n; j >= 0; --j) val = val * s2 + poly[n][j];
    return std::exp(-s2) * val * val / divisor[n];
}

/// Coefficients a_{2j} of k(s) = exp(-s^2) sum a_{2j} s^{2j}.
struct RadialKernelPoly {
    int n = 0;
    std::vector<double> coeffs; // a_0 .. a_{4n} in steps of s^2
};

inline RadialKernelPoly radial_poly_coeffs(int n) {
    if (n < 0 || n > 20) throw RangeError("radial_poly_coeffs: n out of [0,20]");
    std::vector<double> lag(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        lag[j] = binomial(n, j) * ((j & 1) ? -1.0 : 1.0) / factorial(j);
    RadialKernelPoly out;
    out.n = n;
    out.coeffs.assign(static_cast<std::size_t>(2 * n) + 1, 0.0);
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) out.coeffs[p + q] += lag[p] * lag[q];
    return out;
}

/// 2-D Fourier transform of the radial kernel at radius omega, convention
/// (1/2pi) Int exp(i s.w) k(s) d^2 s; Bessel integral reduced to 1F1 terms.
inline double fourier_radial(int n, double omega) {
    if (n < 0 || n > 12) throw RangeError("fourier_radial: n out of [0,12]");
    if (omega < 0.0) throw DomainError("fourier_radial: omega must be nonnegative");
    const RadialKernelPoly rp = radial_poly_coeffs(n);
    const cxd zeta{-0.25 * omega * omega, 0.0};
    KahanSum acc;
    for (int j = 0; j <= 2 * n; ++j) {
        const cxd hyp = special::confluent_hypergeometric_poly(j, 1.0, zeta);
        acc.add(rp.coeffs[j] * 0.5 * factorial(j) * hyp);
    }
    return acc.value().real();
}

/// Plane integral of the radial kernel; the combinatorial sum collapses to 1
/// so the result is exactly pi. Evaluated in exact integer arithmetic.
inline double kernel_integral(int n) {
    if (n < 0 || n > 20) throw RangeError("kernel_integral: n out of [0,20]");
    __int128 sum = 0;
    for (int j = 0; j <= n; ++j) {
        for (int k = 0; k <= n; ++k) {
            __int128 term = static_cast<__int128>(binomial_u64(n, j)) *
                            static_cast<__int128>(binomial_u64(n, k)) *
                            static_cast<__int128>(binomial_u64(j + k, k));
            sum += ((j + k) & 1) ? -term : term;
        }
    }
    if (sum != 1) throw DomainError("kernel_integral: combinatorial identity failed");
    return M_PI * static_cast<double>(sum);
}

/// Max deviation of engine-path kernel values under a translation by h and a
/// rotation by theta applied to both arguments.
inline double translation_rotation_check(const std::array<double, 2>& x1,
                                         const std::array<double, 2>& x2,
                                         const std::array<double, 2>& h, double theta, int n) {
    using stellar::encode_displaced_fock;
    const engine::Options opts;
    auto k_of = [&](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return engine::kernel(encode_displaced_fock(a[0], a[1], n, 1.0),
                              encode_displaced_fock(b[0], b[1], n, 1.0), opts);
    };
    const double base = k_of(x1, x2);
    const double shifted =
        k_of({x1[0] + h[0], x1[1] + h[1]}, {x2[0] + h[0], x2[1] + h[1]});
    const double ct = std::cos(theta), st = std::sin(theta);
    auto rot = [&](const std::array<double, 2>& p) {
        return std::array<double, 2>{ct * p[0] - st * p[1], st * p[0] + ct * p[1]};
    };
    const double rotated = k_of(rot(x1), rot(x2));
    return std::max(std::abs(shifted - base), std::abs(rotated - base));
}

/// Zeros of the radial kernel on s^2 in (0, cut): sign changes of L_n on a
/// dense grid refined by bisection.
inline std::vector<double> radial_kernel_zeros(int n, double cut = 64.0, int grid = 4096) {
    std::vector<double> zeros;
    double prev_u = 1e-12;
    double prev_v = special::laguerre(n, prev_u);
    for (int i = 1; i <= grid; ++i) {
        const double u = cut * i / grid;
        const double v = special::laguerre(n, u);
        if (v == 0.0) {
            zeros.push_back(u);
        } else if (prev_v * v < 0.0) {
            double lo = prev_u, hi = u, flo = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = special::laguerre(n, mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_u = u;
        prev_v = v;
    }
    return zeros;
}

} // namespace cvkernel::closedforms
