#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cvkernel/closedforms.hpp"
#include "cvkernel/engine.hpp"
#include "cvkernel/errors.hpp"
#include "cvkernel/io.hpp"
#include "cvkernel/mlkit.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/oracle.hpp"
#include "cvkernel/quadrature.hpp"
#include "cvkernel/special.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::verify {

struct Check {
    std::string name;
    bool pass = false;
    double observed = 0.0; // worst value seen
    double bound = 0.0;    // the tolerance it was held against
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline bool close_rel_abs(double a, double b, double rel, double abs_floor, double& err_out) {
    const double scale = std::max(std::abs(a), std::abs(b));
    const double err = std::abs(a - b);
    err_out = err;
    if (scale > 1e-8) return err <= rel * scale;
    return err <= abs_floor;
}

inline stellar::StellarFunction random_stellar_m1(Rng& rng, int max_rank, double a_mag,
                                                  double b_mag) {
    const cxd A = rng.complex_in_disk(a_mag);
    const cxd B = rng.complex_in_disk(b_mag);
    const cxd C = rng.complex_in_disk(0.3);
    const int rank = rng.uniform_int(0, max_rank);
    stellar::BetaMap beta;
    for (int k = 0; k < rank; ++k) {
        const cxd c = rng.complex_in_disk(1.0);
        if (c != cxd{0.0, 0.0}) beta[stellar::MultiIndex{std::vector<int>{k}}] = c;
    }
    cxd lead = rng.complex_in_disk(1.0);
    while (std::abs(lead) < 0.2) lead = rng.complex_in_disk(1.0);
    beta[stellar::MultiIndex{std::vector<int>{rank}}] = lead;
    return stellar::make_stellar(1, {A}, {B}, C, std::move(beta));
}

inline stellar::StellarFunction random_stellar_m2(Rng& rng, int max_rank) {
    std::vector<cxd> A(4), B(2);
    A[0] = rng.complex_in_disk(0.3);
    A[3] = rng.complex_in_disk(0.3);
    A[1] = rng.complex_in_disk(0.08);
    A[2] = rng.complex_in_disk(0.08);
    B[0] = rng.complex_in_disk(0.8);
    B[1] = rng.complex_in_disk(0.8);
    const cxd C = rng.complex_in_disk(0.3);
    const int rank = rng.uniform_int(0, max_rank);
    stellar::BetaMap beta;
    for (int d = 0; d <= rank; ++d) {
        for (int i = 0; i <= d; ++i) {
            const cxd c = rng.complex_in_disk(1.0);
            if (c != cxd{0.0, 0.0}) beta[stellar::MultiIndex{std::vector<int>{i, d - i}}] = c;
        }
    }
    cxd lead = rng.complex_in_disk(1.0);
    while (std::abs(lead) < 0.2) lead = rng.complex_in_disk(1.0);
    beta[stellar::MultiIndex{std::vector<int>{rank, 0}}] = lead;
    return stellar::make_stellar(2, std::move(A), std::move(B), C, std::move(beta));
}

/// Numerical 2-D Fourier transform oracle of the radial kernel at radius
/// omega: (1/2pi) Int exp(i s.w) exp(-s^2) L_n(s^2)^2 d^2 s via tensor GH.
inline double fourier_oracle(int n, double omega, int pts = 96) {
    const auto rule = quadrature::gauss_hermite(pts);
    double acc = 0.0;
    for (int i = 0; i < pts; ++i) {
        const double x = rule.nodes[i];
        double inner = 0.0;
        for (int j = 0; j < pts; ++j) {
            const double y = rule.nodes[j];
            const double l = special::laguerre(n, x * x + y * y);
            inner += rule.weights[j] * l * l;
        }
        acc += rule.weights[i] * std::cos(x * omega) * inner;
    }
    return acc / (2.0 * M_PI);
}

inline std::pair<std::array<double, 2>, std::array<double, 2>> pair_with_separation(Rng& rng,
                                                                                    double s) {
    const double cx = rng.uniform(-1.0, 1.0), cy = rng.uniform(-1.0, 1.0);
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    return {{cx, cy}, {cx + s * std::cos(th), cy + s * std::sin(th)}};
}

} // namespace detail

// ---------------------------------------------------------------------------
// closed-form suite
// ---------------------------------------------------------------------------

inline Check check_three_way_agreement(int cases_per_n, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"closed-form/three-way-agreement", true, 0.0, 1e-8, ""};
    for (int n = 0; n <= 8; ++n) {
        for (int t = 0; t < cases_per_n; ++t) {
            const double s2 = rng.uniform(0.0, 64.0);
            const auto [x1, x2] = detail::pair_with_separation(rng, std::sqrt(s2));
            const double dx = x1[0] - x2[0], dy = x1[1] - x2[1];
            const double s2_exact = dx * dx + dy * dy;
            const double ka = std::norm(closedforms::displaced_fock_inner(x1, x2, n, 1.0));
            const double kb = closedforms::displaced_fock_kernel_laguerre(s2_exact, n);
            const double kc = closedforms::table_reference_kernel(s2_exact, n);
            double e1, e2, e3;
            const bool ok = detail::close_rel_abs(ka, kb, 1e-8, 1e-12, e1) &&
                            detail::close_rel_abs(kb, kc, 1e-8, 1e-12, e2) &&
                            detail::close_rel_abs(ka, kc, 1e-8, 1e-12, e3);
            c.observed = std::max({c.observed, e1, e2, e3});
            if (!ok) {
                c.pass = false;
                c.detail = "n=" + std::to_string(n) + " s2=" + format_double(s2_exact);
            }
        }
    }
    return c;
}

inline Check check_kernel_integral_exact() {
    Check c{"closed-form/kernel-integral-exact", true, 0.0, 0.0, ""};
    for (int n = 0; n <= 20; ++n) {
        const double v = closedforms::kernel_integral(n); // throws if the sum is not 1
        c.observed = std::max(c.observed, std::abs(v - M_PI));
        if (v != M_PI) {
            c.pass = false;
            c.detail = "n=" + std::to_string(n);
        }
    }
    return c;
}

inline Check check_kernel_integral_quadrature() {
    Check c{"closed-form/kernel-integral-quadrature", true, 0.0, 1e-6, ""};
    for (int n = 0; n <= 6; ++n) {
        const cxd q = quadrature::adaptive_integrate(
            [n](double u) {
                const double l = special::laguerre(n, u);
                return cxd{std::exp(-u) * l * l, 0.0};
            },
            0.0, 80.0, 1e-11);
        const double err = std::abs(M_PI * q.real() - M_PI);
        c.observed = std::max(c.observed, err);
        if (err > 1e-6) {
            c.pass = false;
            c.detail = "n=" + std::to_string(n);
        }
    }
    return c;
}

inline Check check_zero_counts() {
    Check c{"closed-form/zero-count", true, 0.0, 0.0, ""};
    for (int n = 0; n <= 8; ++n) {
        const auto zeros = closedforms::radial_kernel_zeros(n);
        c.observed = std::max(c.observed, std::abs(static_cast<double>(zeros.size()) - n));
        if (static_cast<int>(zeros.size()) != n) {
            c.pass = false;
            c.detail = "n=" + std::to_string(n) + " found " + std::to_string(zeros.size());
        }
    }
    return c;
}

inline Check check_kernel_bounded() {
    Check c{"closed-form/kernel-in-unit-interval", true, 0.0, 1.0, ""};
    for (int n = 0; n <= 20; ++n) {
        for (int i = 0; i <= 2000; ++i) {
            const double s2 = 100.0 * i / 2000.0;
            const double k = closedforms::displaced_fock_kernel_laguerre(s2, n);
            c.observed = std::max(c.observed, k);
            if (k < 0.0 || k > 1.0) {
                c.pass = false;
                c.detail = "n=" + std::to_string(n) + " s2=" + format_double(s2);
            }
        }
    }
    return c;
}

inline Check check_bandwidth_identity(std::uint64_t seed) {
    Rng rng(seed);
    Check c{"closed-form/bandwidth-identity", true, 0.0, 0.0, ""};
    for (int t = 0; t < 50; ++t) {
        const mlkit::Point a{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        const mlkit::Point b{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        const double cbw = rng.uniform(0.1, 2.5);
        const int n = rng.uniform_int(0, 8);
        mlkit::KernelSpec scaled{mlkit::Family::DisplacedFock, n, 2, cbw};
        mlkit::KernelSpec unit{mlkit::Family::DisplacedFock, n, 2, 1.0};
        const double k1 = mlkit::kernel_value(scaled, a, b);
        const double k2 = mlkit::kernel_value(
            unit, {cbw * a[0], cbw * a[1]}, {cbw * b[0], cbw * b[1]});
        const double err = std::abs(k1 - k2);
        c.observed = std::max(c.observed, err);
        if (err != 0.0) {
            c.pass = false;
            c.detail = "bandwidth composition is not exact";
        }
    }
    return c;
}

inline Check check_fourier_vs_oracle(int n_omegas, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"closed-form/fourier-vs-oracle", true, 0.0, 1e-8, ""};
    for (int n = 0; n <= 6; ++n) {
        for (int t = 0; t < n_omegas; ++t) {
            const double w = rng.uniform(0.0, 6.0);
            const double closed = closedforms::fourier_radial(n, w);
            const double oracle = detail::fourier_oracle(n, w);
            const double err = std::abs(closed - oracle);
            c.observed = std::max(c.observed, err);
            if (err > 1e-8) {
                c.pass = false;
                c.detail = "n=" + std::to_string(n) + " omega=" + format_double(w);
            }
        }
    }
    return c;
}

inline Check check_fourier_positivity() {
    Check c{"closed-form/fourier-positivity", true, 0.0, 1e-10, ""};
    for (int n = 0; n <= 6; ++n) {
        int tiny = 0;
        double min_v = 1e300;
        for (int i = 0; i <= 2000; ++i) {
            const double w = 10.0 * i / 2000.0;
            const double v = closedforms::fourier_radial(n, w);
            min_v = std::min(min_v, v);
            if (v <= 1e-12) ++tiny;
        }
        c.observed = std::min(c.observed, min_v);
        if (min_v < -1e-10 || tiny > 4 * n + 4) {
            c.pass = false;
            c.detail = "n=" + std::to_string(n) + " min=" + format_double(min_v) +
                       " near-zero points=" + std::to_string(tiny);
        }
    }
    return c;
}

inline SuiteResult closed_form_suite(bool quick, std::uint64_t seed) {
    SuiteResult r;
    r.suite = "closed-form";
    r.checks.push_back(check_three_way_agreement(quick ? 10 : 50, seed));
    r.checks.push_back(check_kernel_integral_exact());
    r.checks.push_back(check_kernel_integral_quadrature());
    r.checks.push_back(check_zero_counts());
    r.checks.push_back(check_kernel_bounded());
    r.checks.push_back(check_bandwidth_identity(seed + 1));
    r.checks.push_back(check_fourier_vs_oracle(quick ? 4 : 20, seed + 2));
    r.checks.push_back(check_fourier_positivity());
    return r;
}

// ---------------------------------------------------------------------------
// oracle suite
// ---------------------------------------------------------------------------

inline Check check_engine_vs_quadrature_m1(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"oracle/engine-vs-quadrature-m1", true, 0.0, 1e-7, ""};
    oracle::QuadratureGrid grid;
    for (int t = 0; t < cases; ++t) {
        const auto f1 = detail::random_stellar_m1(rng, 3, 0.6, 1.5);
        const auto f2 = detail::random_stellar_m1(rng, 3, 0.6, 1.5);
        const cxd closed = engine::inner_product(f1, f2);
        const cxd quad = oracle::sb_inner_quadrature(f1, f2, grid);
        const double err = std::abs(closed - quad);
        const double tol = 1e-7 * std::max(1.0, std::abs(quad));
        c.observed = std::max(c.observed, err);
        if (err > tol) {
            c.pass = false;
            c.detail = "case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_engine_vs_fock_m2(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"oracle/engine-vs-fock-m2", true, 0.0, 1e-6, ""};
    for (int t = 0; t < cases; ++t) {
        const auto f1 = detail::random_stellar_m2(rng, 2);
        const auto f2 = detail::random_stellar_m2(rng, 2);
        const cxd closed = engine::inner_product(f1, f2);
        const cxd fock = oracle::sb_inner_fock(f1, f2, 40);
        const double err = std::abs(closed - fock);
        const double tol = 1e-6 * std::max(1.0, std::abs(fock));
        c.observed = std::max(c.observed, err);
        if (err > tol) {
            c.pass = false;
            c.detail = "case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_fock_vs_quadrature(int cases_m1, int cases_m2, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"oracle/fock-vs-quadrature", true, 0.0, 1e-8, ""};
    oracle::QuadratureGrid g1;
    for (int t = 0; t < cases_m1; ++t) {
        const auto f1 = detail::random_stellar_m1(rng, 3, 0.5, 1.2);
        const auto f2 = detail::random_stellar_m1(rng, 3, 0.5, 1.2);
        // |A| near 0.5 decays slowly; K = 120 keeps tails below 1e-9
        const cxd a = oracle::sb_inner_fock(f1, f2, 120);
        const cxd b = oracle::sb_inner_quadrature(f1, f2, g1);
        const double err = std::abs(a - b);
        c.observed = std::max(c.observed, err);
        if (err > 1e-8 * std::max(1.0, std::abs(b))) {
            c.pass = false;
            c.detail = "m=1 case " + std::to_string(t);
        }
    }
    oracle::QuadratureGrid g2;
    g2.points_per_axis = 40;
    for (int t = 0; t < cases_m2; ++t) {
        const auto f1 = detail::random_stellar_m2(rng, 2);
        const auto f2 = detail::random_stellar_m2(rng, 2);
        const cxd a = oracle::sb_inner_fock(f1, f2, 48);
        const cxd b = oracle::sb_inner_quadrature(f1, f2, g2);
        const double err = std::abs(a - b);
        c.observed = std::max(c.observed, err);
        if (err > 1e-8 * std::max(1.0, std::abs(b))) {
            c.pass = false;
            c.detail = "m=2 case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_quadrature_convergence(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"oracle/quadrature-convergence", true, 0.0, 1e-10, ""};
    for (int t = 0; t < cases; ++t) {
        const auto f1 = detail::random_stellar_m1(rng, 3, 0.5, 1.2);
        const auto f2 = detail::random_stellar_m1(rng, 3, 0.5, 1.2);
        oracle::QuadratureGrid coarse, fine;
        coarse.points_per_axis = 64;
        fine.points_per_axis = 128;
        const double err = std::abs(oracle::sb_inner_quadrature(f1, f2, coarse) -
                                    oracle::sb_inner_quadrature(f1, f2, fine));
        c.observed = std::max(c.observed, err);
        if (err > 1e-10) {
            c.pass = false;
            c.detail = "case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_qudit_reduction(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"oracle/qudit-reduction", true, 0.0, 1e-9, ""};
    for (int t = 0; t < cases; ++t) {
        const int d = rng.uniform_int(2, 6);
        auto draw = [&]() {
            std::vector<cxd> v(static_cast<std::size_t>(d));
            double n2 = 0.0;
            for (auto& a : v) {
                a = rng.complex_in_disk(1.0);
                n2 += std::norm(a);
            }
            for (auto& a : v) a /= std::sqrt(n2);
            return v;
        };
        const auto a1 = draw(), a2 = draw();
        const double via_engine =
            engine::kernel(stellar::encode_qudit(a1), stellar::encode_qudit(a2));
        const double direct = std::norm(engine::qudit_inner(a1, a2));
        const double err = std::abs(via_engine - direct);
        c.observed = std::max(c.observed, err);
        if (err > 1e-9) {
            c.pass = false;
            c.detail = "case " + std::to_string(t) + " d=" + std::to_string(d);
        }
    }
    return c;
}

inline SuiteResult oracle_suite(bool quick, std::uint64_t seed) {
    SuiteResult r;
    r.suite = "oracle";
    r.checks.push_back(check_engine_vs_quadrature_m1(quick ? 40 : 200, seed));
    r.checks.push_back(check_engine_vs_fock_m2(quick ? 10 : 50, seed + 1));
    r.checks.push_back(check_fock_vs_quadrature(quick ? 20 : 100, quick ? 5 : 30, seed + 2));
    r.checks.push_back(check_quadrature_convergence(quick ? 5 : 20, seed + 3));
    r.checks.push_back(check_qudit_reduction(quick ? 10 : 50, seed + 4));
    return r;
}

// ---------------------------------------------------------------------------
// invariants suite
// ---------------------------------------------------------------------------

inline Check check_hermitian_symmetry(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/hermitian-symmetry", true, 0.0, 1e-10, ""};
    for (int t = 0; t < cases; ++t) {
        const auto f1 = detail::random_stellar_m1(rng, 3, 0.6, 1.5);
        const auto f2 = detail::random_stellar_m1(rng, 3, 0.6, 1.5);
        const double err = std::abs(engine::inner_product(f1, f2) -
                                    std::conj(engine::inner_product(f2, f1)));
        c.observed = std::max(c.observed, err);
        if (err > 1e-10) c.pass = false;
    }
    return c;
}

inline Check check_gram_psd(int n_datasets, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/gram-psd", true, 0.0, -1e-8, ""};
    const std::vector<mlkit::KernelSpec> encodings = {
        {mlkit::Family::DisplacedFock, 2, 2, 1.0},
        {mlkit::Family::Coherent, 0, 2, 0.7},
        {mlkit::Family::CatTruncation, 4, 2, 0.5},
    };
    double min_eig = 1e300;
    for (int ds = 0; ds < n_datasets; ++ds) {
        std::vector<mlkit::Point> pts;
        const int n = 20;
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
        for (const auto& ks : encodings) {
            const auto g = mlkit::gram(pts, ks, 1);
            const double eig = symmetric_min_eigenvalue(g.values, g.n);
            min_eig = std::min(min_eig, eig);
            if (eig < -1e-8) {
                c.pass = false;
                c.detail = "dataset " + std::to_string(ds) + " family " +
                           mlkit::family_name(ks.family);
            }
        }
    }
    c.observed = min_eig;
    return c;
}

inline Check check_translation_rotation(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/translation-rotation", true, 0.0, 1e-9, ""};
    for (int t = 0; t < cases; ++t) {
        const std::array<double, 2> x1{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const std::array<double, 2> x2{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const std::array<double, 2> h{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        const int n = rng.uniform_int(1, 3);
        const double dev = closedforms::translation_rotation_check(x1, x2, h, th, n);
        c.observed = std::max(c.observed, dev);
        if (dev > 1e-9) {
            c.pass = false;
            c.detail = "case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_radiality(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/radiality", true, 0.0, 1e-9, ""};
    for (int t = 0; t < cases; ++t) {
        const double s = rng.uniform(0.0, 3.0);
        const int n = rng.uniform_int(0, 4);
        const auto [a1, a2] = detail::pair_with_separation(rng, s);
        const auto [b1, b2] = detail::pair_with_separation(rng, s);
        const double k1 = engine::kernel(stellar::encode_displaced_fock(a1[0], a1[1], n, 1.0),
                                         stellar::encode_displaced_fock(a2[0], a2[1], n, 1.0));
        const double k2 = engine::kernel(stellar::encode_displaced_fock(b1[0], b1[1], n, 1.0),
                                         stellar::encode_displaced_fock(b2[0], b2[1], n, 1.0));
        const double err = std::abs(k1 - k2);
        c.observed = std::max(c.observed, err);
        if (err > 1e-9) c.pass = false;
    }
    return c;
}

inline Check check_stellar_round_trip(std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/stellar-round-trip", true, 0.0, 1e-9, ""};
    std::vector<stellar::StellarFunction> states;
    for (int n = 0; n <= 6; ++n)
        states.push_back(stellar::encode_displaced_fock(rng.uniform(-1.5, 1.5),
                                                        rng.uniform(-1.5, 1.5), n, 1.0));
    states.push_back(stellar::encode_qudit({cxd{1.0 / std::sqrt(2.0), 0.0}, cxd{0.0, 0.5},
                                            cxd{0.5, 0.0}}));
    states.push_back(stellar::encode_cat_truncated(cxd{1.2, 0.3}, 6, stellar::CatParity::Even)
                         .state);
    for (const auto& f : states) {
        const int K = std::max(4 * f.rank, 40);
        const auto fv = stellar::fock_coefficients(f, K);
        for (int t = 0; t < 8; ++t) {
            const cxd z = rng.complex_in_disk(1.2);
            KahanSum series;
            for (const auto& [mi, amp] : fv.amplitudes)
                series.add(amp / std::sqrt(factorial(mi[0])) * pow_int(z, mi[0]));
            const cxd direct = f({z});
            const double err = std::abs(series.value() - direct);
            const double tol = 1e-9 * std::max(1.0, std::abs(direct));
            c.observed = std::max(c.observed, err);
            if (err > tol) {
                c.pass = false;
                c.detail = "reconstruction mismatch";
            }
        }
    }
    return c;
}

inline Check check_fock_norms(std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/fock-norm-unity", true, 0.0, 1e-8, ""};
    auto push_err = [&](double n2) {
        const double err = std::abs(std::sqrt(n2) - 1.0);
        c.observed = std::max(c.observed, err);
        if (err > 1e-8) c.pass = false;
    };
    for (int n = 0; n <= 6; ++n) {
        const auto f = stellar::encode_displaced_fock(rng.uniform(-1.5, 1.5),
                                                      rng.uniform(-1.5, 1.5), n, 1.0);
        push_err(stellar::fock_coefficients(f, std::max(4 * n, 40)).norm2());
    }
    for (int t = 0; t < 5; ++t) {
        std::vector<cxd> amps(4);
        double n2 = 0.0;
        for (auto& a : amps) {
            a = rng.complex_in_disk(1.0);
            n2 += std::norm(a);
        }
        for (auto& a : amps) a /= std::sqrt(n2);
        push_err(stellar::fock_coefficients(stellar::encode_qudit(amps), 10).norm2());
    }
    for (int N = 2; N <= 8; N += 2) {
        const auto cat = stellar::encode_cat_truncated(cxd{1.5, 0.0}, N,
                                                       stellar::CatParity::Even);
        push_err(stellar::fock_coefficients(cat.state, N).norm2());
    }
    return c;
}

inline Check check_displaced_fock_rank() {
    Check c{"invariants/displaced-fock-rank", true, 0.0, 0.0, ""};
    for (int n = 0; n <= 10; ++n) {
        const auto f = stellar::encode_displaced_fock(0.7, -0.4, n, 1.3);
        const cxd lead = f.beta.at(stellar::MultiIndex{std::vector<int>{n}});
        const double err = std::abs(lead - cxd{1.0 / std::sqrt(factorial(n)), 0.0});
        c.observed = std::max(c.observed, err);
        if (f.rank != n || err > 1e-15) {
            c.pass = false;
            c.detail = "n=" + std::to_string(n);
        }
    }
    return c;
}

inline Check check_label_flip_involution(std::uint64_t seed) {
    Check c{"invariants/label-flip-involution", true, 0.0, 0.0, ""};
    const auto v1 = mlkit::make_annular(mlkit::dataset_defaults(1, seed));
    const auto v2 = mlkit::make_annular(mlkit::dataset_defaults(2, seed));
    if (v1.points.size() != v2.points.size()) {
        c.pass = false;
        return c;
    }
    for (std::size_t i = 0; i < v1.points.size(); ++i) {
        if (v1.points[i] != v2.points[i]) c.pass = false;
        const int flipped_twice = v1.points[i][1] > 0.0 ? 1 - v2.labels[i] : v2.labels[i];
        if (flipped_twice != v1.labels[i]) c.pass = false;
    }
    return c;
}

inline Check check_gram_diagonal(std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/gram-diagonal", true, 0.0, 1e-8, ""};
    std::vector<mlkit::Point> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    const std::vector<mlkit::KernelSpec> encodings = {
        {mlkit::Family::DisplacedFock, 3, 2, 1.2},
        {mlkit::Family::Coherent, 0, 2, 0.8},
        {mlkit::Family::CatTruncation, 4, 2, 0.6},
    };
    for (const auto& ks : encodings) {
        const auto g = mlkit::gram(pts, ks, 1);
        for (int i = 0; i < g.n; ++i) {
            const double err = std::abs(g.at(i, i) - 1.0);
            c.observed = std::max(c.observed, err);
            if (err > 1e-8) {
                c.pass = false;
                c.detail = mlkit::family_name(ks.family);
            }
        }
    }
    return c;
}

inline Check check_smo_objective_and_kkt(std::uint64_t seed) {
    Check c{"invariants/smo-objective-kkt", true, 0.0, 1e-3, ""};
    const auto full = mlkit::make_annular(mlkit::dataset_defaults(1, seed));
    mlkit::Dataset ds;
    for (std::size_t i = 0; i < full.points.size(); i += 11) {
        ds.points.push_back(full.points[i]);
        ds.labels.push_back(full.labels[i]);
    }
    const mlkit::KernelSpec ks{mlkit::Family::DisplacedFock, 2, 2, 1.0};
    const auto g = mlkit::gram(ds.points, ks, 1);
    std::vector<double> trace;
    mlkit::SvmConfig cfg;
    cfg.objective_trace = &trace;
    const auto model = mlkit::train_svm(g, ds.labels, cfg);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] < trace[i - 1] - 1e-9) {
            c.pass = false;
            c.detail = "objective decreased at pass " + std::to_string(i);
        }
    }
    const double kkt = mlkit::kkt_violation(g, ds.labels, model);
    c.observed = kkt;
    if (kkt > cfg.tol + 1e-6) {
        c.pass = false;
        c.detail = "KKT violation " + format_double(kkt);
    }
    return c;
}

/// Rank-saturated term counts must grow superlinearly in the mode count.
inline Check check_term_growth(std::uint64_t seed) {
    Rng rng(seed);
    Check c{"invariants/term-growth-superlinear", true, 0.0, 0.0, ""};
    auto saturated = [&](int m) {
        const int n = 2;
        std::vector<cxd> A(static_cast<std::size_t>(m) * m), B(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            A[static_cast<std::size_t>(i) * m + i] = rng.complex_in_disk(0.2);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j) A[static_cast<std::size_t>(i) * m + j] = rng.complex_in_disk(0.05);
        for (auto& b : B) b = rng.complex_in_disk(0.5);
        stellar::BetaMap beta;
        std::function<void(std::vector<int>&, int, int)> fill = [&](std::vector<int>& cur,
                                                                    int pos, int rem) {
            if (pos == m) {
                beta[stellar::MultiIndex{cur}] = rng.complex_in_disk(1.0) + cxd{0.3, 0.0};
                return;
            }
            for (int v = 0; v <= rem; ++v) {
                cur[pos] = v;
                fill(cur, pos + 1, rem - v);
                cur[pos] = 0;
            }
        };
        std::vector<int> cur(static_cast<std::size_t>(m), 0);
        for (int d = 0; d <= n; ++d) fill(cur, 0, d);
        return stellar::make_stellar(m, std::move(A), std::move(B), cxd{0.0, 0.0},
                                     std::move(beta));
    };
    std::array<long long, 4> terms{0, 0, 0, 0};
    for (int m = 1; m <= 3; ++m) {
        engine::EvalStats stats;
        const auto f1 = saturated(m);
        const auto f2 = saturated(m);
        engine::inner_product(f1, f2, {}, &stats);
        terms[m] = stats.terms;
    }
    const double g21 = static_cast<double>(terms[2]) / terms[1];
    const double g32 = static_cast<double>(terms[3]) / terms[2];
    c.observed = g32;
    c.detail = "terms m=1:" + std::to_string(terms[1]) + " m=2:" + std::to_string(terms[2]) +
               " m=3:" + std::to_string(terms[3]);
    if (!(g21 > 2.0 && g32 > g21)) c.pass = false;
    return c;
}

inline Check check_experiment_determinism() {
    Check c{"invariants/experiment-determinism", true, 0.0, 0.0, ""};
    const mlkit::KernelSpec ks{mlkit::Family::DisplacedFock, 1, 2, 1.0};
    const auto r1 = mlkit::run_experiment(1, ks, 42, 16, 1);
    const auto r2 = mlkit::run_experiment(1, ks, 42, 16, 1);
    const std::string j1 = io::report_to_json(r1.report).dump();
    const std::string j2 = io::report_to_json(r2.report).dump();
    bool same = j1 == j2 && r1.grid.size() == r2.grid.size();
    if (same) {
        for (std::size_t i = 0; i < r1.grid.size(); ++i) {
            if (r1.grid[i].decision != r2.grid[i].decision || r1.grid[i].label != r2.grid[i].label)
                same = false;
        }
    }
    c.pass = same;
    if (!same) c.detail = "repeated run differs";
    return c;
}

inline SuiteResult invariants_suite(bool quick, std::uint64_t seed) {
    SuiteResult r;
    r.suite = "invariants";
    r.checks.push_back(check_hermitian_symmetry(quick ? 10 : 50, seed));
    r.checks.push_back(check_gram_psd(quick ? 5 : 20, seed + 1));
    r.checks.push_back(check_translation_rotation(quick ? 5 : 20, seed + 2));
    r.checks.push_back(check_radiality(quick ? 5 : 20, seed + 3));
    r.checks.push_back(check_stellar_round_trip(seed + 4));
    r.checks.push_back(check_fock_norms(seed + 5));
    r.checks.push_back(check_displaced_fock_rank());
    r.checks.push_back(check_label_flip_involution(seed + 6));
    r.checks.push_back(check_gram_diagonal(seed + 7));
    r.checks.push_back(check_smo_objective_and_kkt(seed + 8));
    r.checks.push_back(check_term_growth(seed + 9));
    if (!quick) r.checks.push_back(check_experiment_determinism());
    return r;
}

// ---------------------------------------------------------------------------
// bounds suite
// ---------------------------------------------------------------------------

inline Check check_cat_bound_scenarios(int cases, std::uint64_t seed) {
    Rng rng(seed);
    Check c{"bounds/cat-truncation-bound", true, 0.0, 0.0, ""};
    for (int t = 0; t < cases; ++t) {
        const cxd a1 = std::polar(rng.uniform(0.2, 2.5), rng.uniform(0.0, 2.0 * M_PI));
        const cxd a2 = std::polar(rng.uniform(0.2, 2.5), rng.uniform(0.0, 2.0 * M_PI));
        const auto p1 = rng.uniform() < 0.5 ? stellar::CatParity::Even : stellar::CatParity::Odd;
        const auto p2 = rng.uniform() < 0.5 ? stellar::CatParity::Even : stellar::CatParity::Odd;
        const int n1 = rng.uniform_int(p1 == stellar::CatParity::Odd ? 1 : 0, 12);
        const int n2 = rng.uniform_int(p2 == stellar::CatParity::Odd ? 1 : 0, 12);
        const auto b = oracle::cat_bound_scenario(a1, p1, n1, a2, p2, n2);
        c.observed = std::max(c.observed, b.lhs - b.rhs);
        if (!b.holds) {
            c.pass = false;
            c.detail = "case " + std::to_string(t);
        }
    }
    return c;
}

inline Check check_bound_gap_monotone() {
    Check c{"bounds/gap-monotone-to-zero", true, 0.0, 1e-12, ""};
    const cxd alpha{2.0, 0.0};
    double prev = 1e300;
    double last = 0.0;
    for (int N = 2; N <= 12; N += 2) {
        const auto b = oracle::cat_bound_scenario(alpha, stellar::CatParity::Even, N, alpha * 0.8,
                                                  stellar::CatParity::Even, N);
        if (b.lhs > prev + 1e-12) {
            c.pass = false;
            c.detail = "gap increased at N=" + std::to_string(N);
        }
        prev = b.lhs;
        last = b.lhs;
    }
    c.observed = last;
    if (last > 1e-4) {
        c.pass = false;
        c.detail = "gap did not approach zero";
    }
    return c;
}

inline Check check_premise_rejection() {
    Check c{"bounds/premise-rejection", true, 0.0, 0.0, ""};
    const auto psi1 = oracle::cat_fock_vector(cxd{1.5, 0.0}, stellar::CatParity::Even, 80);
    const auto psi2 = oracle::cat_fock_vector(cxd{0.9, 0.0}, stellar::CatParity::Even, 80);
    const auto t1 = stellar::encode_cat_truncated(cxd{1.5, 0.0}, 4, stellar::CatParity::Even);
    const auto t2 = stellar::encode_cat_truncated(cxd{0.9, 0.0}, 4, stellar::CatParity::Even);
    try {
        // claim far tighter fidelity than the truncation achieves
        oracle::infinite_rank_bound_check(psi1, psi2, t1.state, t2.state, 1e-12, 1e-12);
        c.pass = false;
        c.detail = "premise violation was not detected";
    } catch (const PremiseError&) {
        c.pass = true;
    }
    return c;
}

inline SuiteResult bounds_suite(bool quick, std::uint64_t seed) {
    SuiteResult r;
    r.suite = "bounds";
    r.checks.push_back(check_cat_bound_scenarios(quick ? 40 : 200, seed));
    r.checks.push_back(check_bound_gap_monotone());
    r.checks.push_back(check_premise_rejection());
    return r;
}

inline SuiteResult run_suite(const std::string& name, bool quick, std::uint64_t seed) {
    if (name == "closed-form") return closed_form_suite(quick, seed);
    if (name == "oracle") return oracle_suite(quick, seed);
    if (name == "invariants") return invariants_suite(quick, seed);
    if (name == "bounds") return bounds_suite(quick, seed);
    throw RangeError("unknown verify suite: " + name);
}

} // namespace cvkernel::verify
