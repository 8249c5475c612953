#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include <json.hpp>

#include "cvkernel/io.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/stellar.hpp"

using namespace cvkernel;
using namespace cvkernel::stellar;

namespace {

MultiIndex mi1(int k) { return MultiIndex{std::vector<int>{k}}; }

} // namespace

TEST(EncodeDisplacedFock, VacuumCenteredFockState) {
    // alpha = 0 leaves the bare Fock state z^n / sqrt(n!)
    const auto f = encode_displaced_fock(0.0, 0.0, 2, 1.0);
    EXPECT_EQ(f.rank, 2);
    EXPECT_EQ(f.beta.size(), 1u);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(2)) - cxd{1.0 / std::sqrt(2.0), 0.0}), 0.0, 1e-15);
    EXPECT_EQ(f.C, cxd(0.0, 0.0));
    EXPECT_EQ(f.B[0], cxd(0.0, 0.0));
}

TEST(EncodeDisplacedFock, CoherentState) {
    const auto f = encode_displaced_fock(1.0, 0.0, 0, 1.0);
    EXPECT_EQ(f.rank, 0);
    EXPECT_NEAR(std::abs(f.B[0] - cxd{1.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.C - cxd{-0.5, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(0)) - cxd{1.0, 0.0}), 0.0, 1e-15);
}

TEST(EncodeDisplacedFock, BandwidthTwoRankOne) {
    // (z - 2) e^{2z - 2} expanded: beta0 = -2, beta1 = 1
    const auto f = encode_displaced_fock(1.0, 0.0, 1, 2.0);
    EXPECT_NEAR(std::abs(f.B[0] - cxd{2.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.C - cxd{-2.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(0)) - cxd{-2.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(1)) - cxd{1.0, 0.0}), 0.0, 1e-15);
}

TEST(EncodeDisplacedFock, BandwidthComposesExactly) {
    for (int n : {0, 1, 3}) {
        const auto a = encode_displaced_fock(0.7, -1.2, n, 1.5);
        const auto b = encode_displaced_fock(1.5 * 0.7, 1.5 * -1.2, n, 1.0);
        EXPECT_EQ(a.B[0], b.B[0]);
        EXPECT_EQ(a.C, b.C);
        ASSERT_EQ(a.beta.size(), b.beta.size());
        for (const auto& [mi, c] : a.beta) EXPECT_EQ(c, b.beta.at(mi));
    }
}

TEST(EncodeQudit, BasisStates) {
    const auto vac = encode_qudit({cxd{1.0, 0.0}, cxd{0.0, 0.0}});
    EXPECT_EQ(vac.rank, 0);
    EXPECT_NEAR(std::abs(vac.beta.at(mi1(0)) - cxd{1.0, 0.0}), 0.0, 1e-15);

    const auto one = encode_qudit({cxd{0.0, 0.0}, cxd{1.0, 0.0}});
    EXPECT_EQ(one.rank, 1);
    EXPECT_NEAR(std::abs(one.beta.at(mi1(1)) - cxd{1.0, 0.0}), 0.0, 1e-15);
}

TEST(EncodeQudit, SqrtFactorialWeights) {
    const double r = 1.0 / std::sqrt(2.0);
    const auto f = encode_qudit({cxd{r, 0.0}, cxd{r, 0.0}, cxd{0.0, 0.0}});
    EXPECT_EQ(f.rank, 1);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(0)) - cxd{r, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(f.beta.at(mi1(1)) - cxd{r, 0.0}), 0.0, 1e-15);
    EXPECT_EQ(f.beta.count(mi1(2)), 0u);
}

TEST(EncodeQudit, RejectsUnnormalized) {
    EXPECT_THROW(encode_qudit({cxd{1.0, 0.0}, cxd{0.1, 0.0}}), NormalizationError);
}

TEST(EncodeCat, SmallAlphaEvenIsVacuum) {
    const auto cat = encode_cat_truncated(cxd{1e-8, 0.0}, 0, CatParity::Even);
    EXPECT_EQ(cat.state.rank, 0);
    EXPECT_NEAR(cat.fidelity_deficit, 0.0, 1e-7);
    EXPECT_NEAR(std::abs(cat.state.beta.at(mi1(0)) - cxd{1.0, 0.0}), 0.0, 1e-9);
}

TEST(EncodeCat, DeficitMatchesTailMass) {
    // closed-form cat amplitudes: |c_{2k}|^2 = 4 e^{-a^2} a^{4k} / (2k)! / N+
    const double a = 2.0;
    const double np = 2.0 * (1.0 + std::exp(-2.0 * a * a));
    double kept = 0.0;
    for (int k = 0; k <= 2; k += 2)
        kept += 4.0 * std::exp(-a * a) * std::pow(a, 2.0 * k) / factorial(k) / np;
    const auto cat = encode_cat_truncated(cxd{a, 0.0}, 2, CatParity::Even);
    EXPECT_NEAR(cat.fidelity_deficit, std::sqrt(1.0 - kept), 1e-12);
}

TEST(EncodeCat, EvenCatAtRankTen) {
    const auto cat = encode_cat_truncated(cxd{1.0, 0.0}, 10, CatParity::Even);
    EXPECT_LT(cat.fidelity_deficit, 1e-4);
}

TEST(EncodeCat, DegenerateTruncation) {
    // odd cat truncated below its first occupied level
    EXPECT_THROW(encode_cat_truncated(cxd{1.0, 0.0}, 0, CatParity::Odd), DegenerateStateError);
}

TEST(FockCoefficients, SingleFockState) {
    const auto f = encode_displaced_fock(0.0, 0.0, 1, 1.0);
    const auto fv = fock_coefficients(f, 3);
    EXPECT_NEAR(std::abs(fv.at(0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fv.at(1) - cxd{1.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fv.at(2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fv.at(3)), 0.0, 1e-15);
}

TEST(FockCoefficients, CoherentPoissonAmplitudes) {
    const auto f = encode_displaced_fock(1.0, 0.0, 0, 1.0);
    const auto fv = fock_coefficients(f, 20);
    for (int k = 0; k <= 20; ++k) {
        const double expect = std::exp(-0.5) / std::sqrt(factorial(k));
        EXPECT_NEAR(std::abs(fv.at(k) - cxd{expect, 0.0}), 0.0, 1e-12) << "k=" << k;
    }
    EXPECT_FALSE(fv.tail_warning);
}

TEST(FockCoefficients, DisplacementIsUnitary) {
    const auto f = encode_displaced_fock(1.0, 0.0, 1, 1.0);
    const auto fv = fock_coefficients(f, 20);
    EXPECT_NEAR(std::sqrt(fv.norm2()), 1.0, 1e-9);
}

TEST(FockCoefficients, TwoModeProductState) {
    // product of two coherent states: amplitudes factorize
    BetaMap beta;
    beta[MultiIndex{std::vector<int>{0, 0}}] = cxd{1.0, 0.0};
    const cxd a1{0.5, 0.2}, a2{-0.3, 0.4};
    const auto f =
        make_stellar(2, {cxd{}, cxd{}, cxd{}, cxd{}}, {a1, a2},
                     -0.5 * (std::norm(a1) + std::norm(a2)), std::move(beta));
    const auto fv = fock_coefficients(f, 16);
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 3; ++j) {
            const cxd expect = std::exp(-0.5 * std::norm(a1)) * pow_int(a1, i) /
                               std::sqrt(factorial(i)) * std::exp(-0.5 * std::norm(a2)) *
                               pow_int(a2, j) / std::sqrt(factorial(j));
            const auto it = fv.amplitudes.find(MultiIndex{std::vector<int>{i, j}});
            ASSERT_NE(it, fv.amplitudes.end());
            EXPECT_NEAR(std::abs(it->second - expect), 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(fv.norm2(), 1.0, 1e-9);
}

TEST(FockCoefficients, Guards) {
    const auto f = encode_displaced_fock(0.0, 0.0, 3, 1.0);
    EXPECT_THROW(fock_coefficients(f, 2), RangeError);
    EXPECT_THROW(fock_coefficients(f, 201), RangeError);
}

TEST(Normalize, AlreadyNormalizedUnchanged) {
    const auto f = encode_displaced_fock(0.8, -0.3, 2, 1.0);
    const auto g = normalize(f);
    EXPECT_NEAR(std::abs(g.C - f.C), 0.0, 1e-12);
}

TEST(Normalize, ScaledVacuum) {
    BetaMap beta;
    beta[mi1(0)] = cxd{2.0, 0.0};
    const auto f = make_stellar(1, {cxd{}}, {cxd{}}, cxd{}, std::move(beta));
    const auto g = normalize(f);
    EXPECT_NEAR(std::abs(g.C - cxd{-std::log(2.0), 0.0}), 0.0, 1e-12);
}

TEST(Normalize, RandomGaussianSelfKernelOne) {
    BetaMap beta;
    beta[mi1(0)] = cxd{1.0, 0.0};
    const auto f =
        make_stellar(1, {cxd{0.3, 0.0}}, {cxd{0.7, 0.0}}, cxd{0.2, 0.1}, std::move(beta));
    const auto g = normalize(f);
    const auto fv = fock_coefficients(g, 60);
    EXPECT_NEAR(fv.norm2(), 1.0, 1e-10);
}

TEST(MakeStellar, Validation) {
    BetaMap empty;
    EXPECT_THROW(make_stellar(1, {cxd{}}, {cxd{}}, cxd{}, empty), DomainError);

    BetaMap zero_only;
    zero_only[mi1(1)] = cxd{0.0, 0.0};
    EXPECT_THROW(make_stellar(1, {cxd{}}, {cxd{}}, cxd{}, std::move(zero_only)), DomainError);

    BetaMap ok;
    ok[mi1(0)] = cxd{1.0, 0.0};
    EXPECT_THROW(make_stellar(1, {cxd{-1.5, 0.0}}, {cxd{}}, cxd{}, std::move(ok)), DomainError);
}

TEST(MakeStellar, RankIsTight) {
    BetaMap beta;
    beta[mi1(0)] = cxd{0.5, 0.0};
    beta[mi1(3)] = cxd{0.0, 0.0}; // dropped
    beta[mi1(2)] = cxd{0.0, 0.25};
    const auto f = make_stellar(1, {cxd{}}, {cxd{}}, cxd{}, std::move(beta));
    EXPECT_EQ(f.rank, 2);
}

TEST(StellarJson, RoundTrip) {
    const auto f = encode_displaced_fock(0.9, 0.4, 3, 1.25);
    const auto j = io::stellar_to_json(f);
    const auto g = io::stellar_from_json(j);
    EXPECT_EQ(g.modes, f.modes);
    EXPECT_EQ(g.rank, f.rank);
    EXPECT_EQ(g.A, f.A);
    EXPECT_EQ(g.B, f.B);
    EXPECT_EQ(g.C, f.C);
    ASSERT_EQ(g.beta.size(), f.beta.size());
    for (const auto& [mi, c] : f.beta) EXPECT_EQ(g.beta.at(mi), c);
}

TEST(CatOverlap, MatchesFockSeries) {
    const cxd a1{1.3, 0.4}, a2{0.7, -0.9};
    const auto p1 = CatParity::Even, p2 = CatParity::Odd;
    const auto v1 = cat_fock_amplitudes(a1, p1, 120);
    const auto v2 = cat_fock_amplitudes(a2, p2, 120);
    cxd series{0.0, 0.0};
    for (int k = 0; k <= 120; ++k) series += std::conj(v1[k]) * v2[k];
    const cxd analytic = cat_overlap(a1, p1, a2, p2);
    EXPECT_NEAR(std::abs(series - analytic), 0.0, 1e-12);
}
