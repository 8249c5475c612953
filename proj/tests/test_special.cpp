#include <gtest/gtest.h>

#include <quadmath.h>

#include <cmath>
#include <complex>

#include "cvkernel/numeric.hpp"
#include "cvkernel/quadrature.hpp"
#include "cvkernel/special.hpp"

using namespace cvkernel;
using special::confluent_hypergeometric_poly;
using special::gamma_coeff;
using special::gaussian_poly_integral;
using special::laguerre;

namespace {

// Independent series oracle for 1F1(a; b; z), summed until terms vanish.
cxd hyp1f1_series(double a, double b, cxd z) {
    cxd term{1.0, 0.0}, sum{1.0, 0.0};
    for (int k = 0; k < 400; ++k) {
        term *= (a + k) * z / ((b + k) * (k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// --- quad-precision adaptive Simpson oracle for Int exp(-ax^2+bx) x^r dx ---
//
// The integrand can be violently oscillatory (Im(a) up to 4) while the
// integral itself is exponentially small, so the oracle runs in __float128.

struct Qcx {
    __float128 re, im;
};

Qcx qadd(Qcx a, Qcx b) { return {a.re + b.re, a.im + b.im}; }
Qcx qsub(Qcx a, Qcx b) { return {a.re - b.re, a.im - b.im}; }
Qcx qscale(__float128 s, Qcx a) { return {s * a.re, s * a.im}; }
Qcx qmul(Qcx a, Qcx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Qcx qexp(Qcx a) {
    const __float128 m = expq(a.re);
    return {m * cosq(a.im), m * sinq(a.im)};
}
__float128 qabs2(Qcx a) { return a.re * a.re + a.im * a.im; }

struct GaussPolyIntegrand {
    Qcx a, b;
    __float128 peak_re; // Re(b^2/4a), factored out for scale
    int r;

    Qcx operator()(__float128 x) const {
        Qcx e{-a.re * x * x + b.re * x - peak_re, -a.im * x * x + b.im * x};
        Qcx v = qexp(e);
        for (int k = 0; k < r; ++k) v = qscale(x, v);
        return v;
    }
};

// 32-point Gauss-Legendre nodes/weights on [-1,1] in quad precision
void gauss_legendre_q(int n, std::vector<__float128>& xs, std::vector<__float128>& ws) {
    xs.assign(n, 0.0q);
    ws.assign(n, 0.0q);
    const __float128 pi_q = 3.141592653589793238462643383279502884q;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        __float128 z = cosq(pi_q * (i + 0.75q) / (n + 0.5q));
        __float128 pp = 0.0q;
        for (int it = 0; it < 100; ++it) {
            __float128 p1 = 1.0q, p2 = 0.0q;
            for (int j = 0; j < n; ++j) {
                const __float128 p3 = p2;
                p2 = p1;
                p1 = ((2.0q * j + 1.0q) * z * p2 - j * p3) / (j + 1.0q);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0q);
            const __float128 dz = p1 / pp;
            z -= dz;
            if (fabsq(dz) < 1e-32q) break;
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        ws[i] = ws[n - 1 - i] = 2.0q / ((1.0q - z * z) * pp * pp);
    }
}

cxd gaussian_poly_quadrature_oracle(int r, cxd a, cxd b) {
    GaussPolyIntegrand f;
    f.a = {a.real(), a.imag()};
    f.b = {b.real(), b.imag()};
    f.r = r;
    const cxd peak = b * b / (4.0 * a);
    f.peak_re = peak.real();
    const double x0 = b.real() / (2.0 * a.real());
    const double width = 1.0 / std::sqrt(a.real());
    const double half = std::abs(x0) + width * (10.0 + r);

    // enough panels that each sees at most a few oscillation periods
    const double phase = std::abs(a.imag()) * half * half + std::abs(b.imag()) * half;
    const int panels = std::max(64, static_cast<int>(phase / (2.0 * M_PI)) / 2 + 8);

    static std::vector<__float128> xs, ws;
    if (xs.empty()) gauss_legendre_q(32, xs, ws);

    Qcx total{0.0q, 0.0q};
    for (int p = 0; p < panels; ++p) {
        const __float128 pa = -half + 2.0q * static_cast<__float128>(half) * p / panels;
        const __float128 pb = -half + 2.0q * static_cast<__float128>(half) * (p + 1) / panels;
        const __float128 mid = 0.5q * (pa + pb), rad = 0.5q * (pb - pa);
        Qcx acc{0.0q, 0.0q};
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc = qadd(acc, qscale(ws[i], f(mid + rad * xs[i])));
        total = qadd(total, qscale(rad, acc));
    }
    total = qscale(expq(f.peak_re), total);
    return {static_cast<double>(total.re), static_cast<double>(total.im)};
}

} // namespace

TEST(GammaCoeff, PinnedValues) {
    EXPECT_DOUBLE_EQ(gamma_coeff(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(gamma_coeff(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(gamma_coeff(2, 2), 0.25);
    EXPECT_DOUBLE_EQ(gamma_coeff(4, 2), 0.75);
}

TEST(GammaCoeff, ParityStructureExhaustive) {
    for (int r = 0; r <= 30; ++r) {
        for (int j = 0; j <= r; ++j) {
            const double v = gamma_coeff(r, j);
            if ((r - j) % 2 == 1) {
                EXPECT_EQ(v, 0.0) << "r=" << r << " j=" << j;
            } else {
                EXPECT_GT(v, 0.0) << "r=" << r << " j=" << j;
            }
        }
    }
}

// Each nonzero coefficient recovers r! when multiplied back out.
TEST(GammaCoeff, TermwiseFactorialRecovery) {
    for (int r = 0; r <= 30; ++r) {
        for (int j = r % 2; j <= r; j += 2) {
            const double back =
                gamma_coeff(r, j) * std::pow(2.0, r) * factorial(j) * factorial((r - j) / 2);
            EXPECT_NEAR(back, factorial(r), 1e-9 * factorial(r)) << "r=" << r << " j=" << j;
        }
    }
}

TEST(GammaCoeff, LargeRMatchesLogSpace) {
    // straddle the r=20 switch point
    for (int r = 18; r <= 24; ++r) {
        for (int j = r % 2; j <= r; j += 2) {
            const double direct =
                factorial(r) / (std::pow(2.0, r) * factorial((r - j) / 2) * factorial(j));
            EXPECT_NEAR(gamma_coeff(r, j), direct, 1e-12 * direct);
        }
    }
}

TEST(GammaCoeff, RangeGuards) {
    EXPECT_THROW(gamma_coeff(65, 0), RangeError);
    EXPECT_THROW(gamma_coeff(-1, 0), RangeError);
    EXPECT_THROW(gamma_coeff(4, 5), RangeError);
}

TEST(GaussianPolyIntegral, PinnedValues) {
    const double sqrt_pi = std::sqrt(M_PI);
    EXPECT_NEAR(std::abs(gaussian_poly_integral(0, 1.0, 0.0) - sqrt_pi), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(gaussian_poly_integral(1, 1.0, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(gaussian_poly_integral(2, 1.0, 0.0) - 0.5 * sqrt_pi), 0.0, 1e-14);
    const cxd expect = std::sqrt(M_PI / 2.0) * std::exp(1.0 / 8.0);
    EXPECT_NEAR(std::abs(gaussian_poly_integral(0, 2.0, 1.0) - expect), 0.0, 1e-12);
}

TEST(GaussianPolyIntegral, DivergentDomain) {
    EXPECT_THROW(gaussian_poly_integral(0, cxd{-0.1, 0.3}, 0.0), DomainError);
    EXPECT_THROW(gaussian_poly_integral(0, cxd{0.0, 1.0}, 0.0), DomainError);
}

TEST(GaussianPolyIntegral, AgreesWithAdaptiveQuadrature) {
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        const int r = rng.uniform_int(0, 10);
        const cxd a{rng.uniform(0.3, 4.0), rng.uniform(-4.0, 4.0)};
        const cxd b{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        const cxd closed = gaussian_poly_integral(r, a, b);
        const cxd quad = gaussian_poly_quadrature_oracle(r, a, b);
        const double tol = std::abs(quad) > 1e-8 ? 1e-10 * std::abs(quad) : 1e-10;
        EXPECT_NEAR(std::abs(closed - quad), 0.0, tol)
            << "r=" << r << " a=" << a << " b=" << b;
    }
}

// Assembles the hypergeometric form of the integral and checks it against
// the gamma-coefficient form; the two routes share no code.
TEST(GaussianPolyIntegral, HypergeometricRouteAgrees) {
    Rng rng(202);
    for (int n = 0; n <= 10; ++n) {
        for (int t = 0; t < 20; ++t) {
            const cxd a{rng.uniform(0.4, 2.5), rng.uniform(-1.0, 1.0)};
            const cxd b{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const cxd zeta = b * b / (4.0 * a);
            const cxd apow = std::pow(a, -0.5 * (n + 1));
            cxd viaHyp;
            if (n % 2 == 0) {
                viaHyp = apow * std::tgamma(0.5 + 0.5 * n) *
                         confluent_hypergeometric_poly(n / 2, 0.5, zeta);
            } else {
                viaHyp = apow * std::tgamma(1.0 + 0.5 * n) * (b / std::sqrt(a)) *
                         confluent_hypergeometric_poly((n - 1) / 2, 1.5, zeta);
            }
            const cxd viaGamma = gaussian_poly_integral(n, a, b);
            const double tol = 1e-10 * std::max(1e-8, std::abs(viaGamma));
            EXPECT_NEAR(std::abs(viaHyp - viaGamma), 0.0, tol) << "n=" << n;
        }
    }
}

TEST(ConfluentHypergeometric, PinnedValues) {
    // n = 0 collapses to exp(zeta)
    const cxd zeta{0.7, -0.3};
    EXPECT_NEAR(std::abs(confluent_hypergeometric_poly(0, 0.5, zeta) - std::exp(zeta)), 0.0,
                1e-14);
    EXPECT_NEAR(std::abs(confluent_hypergeometric_poly(1, 1.0, 0.0) - cxd{1.0, 0.0}), 0.0,
                1e-15);
    // 1F1(3; 1; 1) = e * (1 + 2 + 1/2)
    const double expect = std::exp(1.0) * 3.5;
    EXPECT_NEAR(confluent_hypergeometric_poly(2, 1.0, 1.0).real(), expect, 1e-12 * expect);
}

TEST(ConfluentHypergeometric, MatchesSeriesOracle) {
    Rng rng(303);
    for (int n = 0; n <= 8; ++n) {
        for (double b : {0.5, 1.0, 1.5, 3.0}) {
            for (int t = 0; t < 5; ++t) {
                const cxd zeta = rng.complex_in_disk(3.0);
                const cxd poly = confluent_hypergeometric_poly(n, b, zeta);
                const cxd series = hyp1f1_series(b + n, b, zeta);
                EXPECT_NEAR(std::abs(poly - series), 0.0,
                            1e-11 * std::max(1.0, std::abs(series)));
            }
        }
    }
}

TEST(Laguerre, PinnedValues) {
    EXPECT_DOUBLE_EQ(laguerre(0, 7.3), 1.0);
    EXPECT_NEAR(laguerre(1, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(laguerre(2, 2.0), -1.0, 1e-14);
}

// Binomial-sum oracle in quad precision; the alternating terms reach ~3e10
// at x = 40, far beyond what double accumulation can cancel accurately.
TEST(Laguerre, MatchesBinomialSum) {
    Rng rng(404);
    for (int n = 0; n <= 12; ++n) {
        for (int t = 0; t < 50; ++t) {
            const double x = rng.uniform(0.0, 40.0);
            __float128 sum = 1.0q, term = 1.0q;
            for (int j = 0; j < n; ++j) {
                term *= -static_cast<__float128>(x) * (n - j) / ((j + 1.0q) * (j + 1.0q));
                sum += term;
            }
            const double oracle = static_cast<double>(sum);
            const double rec = laguerre(n, x);
            EXPECT_NEAR(rec, oracle, 1e-9 * std::max(1.0, std::abs(oracle)))
                << "n=" << n << " x=" << x;
        }
    }
}

TEST(Laguerre, Guards) {
    EXPECT_THROW(laguerre(65, 1.0), RangeError);
    EXPECT_THROW(laguerre(2, -0.5), RangeError);
}

TEST(GaussHermite, RuleIntegratesMoments) {
    for (int n : {8, 32, 64}) {
        const auto rule = quadrature::gauss_hermite(n);
        double w0 = 0.0, w2 = 0.0, w4 = 0.0;
        for (int i = 0; i < n; ++i) {
            w0 += rule.weights[i];
            w2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
            w4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
        }
        const double sp = std::sqrt(M_PI);
        EXPECT_NEAR(w0, sp, 1e-13 * sp);
        EXPECT_NEAR(w2, 0.5 * sp, 1e-13 * sp);
        EXPECT_NEAR(w4, 0.75 * sp, 1e-12 * sp);
    }
}

TEST(NumericUtils, ExactBinomials) {
    EXPECT_EQ(binomial_u64(0, 0), 1ULL);
    EXPECT_EQ(binomial_u64(5, 2), 10ULL);
    EXPECT_EQ(binomial_u64(40, 20), 137846528820ULL);
    EXPECT_EQ(binomial_u64(3, 5), 0ULL);
}

TEST(NumericUtils, KahanSurvivesCancellation) {
    // naive double accumulation loses the small term entirely
    KahanSum acc;
    acc.add(cxd{1e16, 0.0});
    for (int i = 0; i < 10; ++i) acc.add(cxd{1.0, 0.0});
    acc.add(cxd{-1e16, 0.0});
    EXPECT_DOUBLE_EQ(acc.value().real(), 10.0);
}

TEST(NumericUtils, JacobiMinEigenvalue) {
    // [[2,1],[1,2]] has eigenvalues {1, 3}
    EXPECT_NEAR(symmetric_min_eigenvalue({2, 1, 1, 2}, 2), 1.0, 1e-12);
    // rotate diag(1, 2, 5) by a random orthogonal basis; spectrum is invariant
    Rng rng(11);
    const double th1 = rng.uniform(0.0, M_PI), th2 = rng.uniform(0.0, M_PI);
    auto rot = [&](std::vector<double> m, int axis) {
        const double c = std::cos(axis ? th2 : th1), s = std::sin(axis ? th2 : th1);
        const int i = axis ? 1 : 0, j = axis ? 2 : 1;
        std::vector<double> r = m;
        for (int k = 0; k < 3; ++k) {
            r[3 * k + i] = c * m[3 * k + i] - s * m[3 * k + j];
            r[3 * k + j] = s * m[3 * k + i] + c * m[3 * k + j];
        }
        m = r;
        for (int k = 0; k < 3; ++k) {
            m[3 * i + k] = c * r[3 * i + k] - s * r[3 * j + k];
            m[3 * j + k] = s * r[3 * i + k] + c * r[3 * j + k];
        }
        return m;
    };
    std::vector<double> a{1, 0, 0, 0, 2, 0, 0, 0, 5};
    a = rot(rot(a, 0), 1);
    EXPECT_NEAR(symmetric_min_eigenvalue(a, 3), 1.0, 1e-10);
}

TEST(NumericUtils, RoundTripDecimalFormatting) {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 6.02214076e23, -0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}
