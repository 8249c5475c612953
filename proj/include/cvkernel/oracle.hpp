#pragma once

#include <cmath>
#include <vector>

#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/quadrature.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::oracle {

using stellar::FockVector;
using stellar::StellarFunction;

enum class Scheme { TensorGaussHermite, Adaptive };

struct QuadratureGrid {
    Scheme scheme = Scheme::TensorGaussHermite;
    int points_per_axis = 64;
    double tolerance = 1e-9; // only enforced by the adaptive scheme
};

namespace detail {

/// One Gauss-Hermite pass over the 2m-dimensional SB integral. Each axis is
/// rescaled so the combined Gaussian decay matches the exp(-x^2) weight.
inline cxd gh_pass(const StellarFunction& f1, const StellarFunction& f2, int points) {
    const int m = f1.modes;
    const int dims = 2 * m;
    const auto rule = quadrature::gauss_hermite(points);

    std::vector<double> sigma(static_cast<std::size_t>(dims));
    for (int j = 0; j < m; ++j) {
        const double diag = 0.5 * (f1.a_at(j, j).real() + f2.a_at(j, j).real());
        const double w_re = 1.0 + diag;
        const double w_im = 1.0 - diag;
        if (w_re <= 0.05 || w_im <= 0.05)
            throw DomainError("sb_inner_quadrature: Gaussian decay too weak for quadrature");
        sigma[2 * j] = 1.0 / std::sqrt(w_re);
        sigma[2 * j + 1] = 1.0 / std::sqrt(w_im);
    }
    double jac = 1.0;
    for (double s : sigma) jac *= s;

    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<cxd> z(static_cast<std::size_t>(m));
    KahanSum acc;
    while (true) {
        double w = 1.0;
        double xi2 = 0.0, x2 = 0.0;
        for (int t = 0; t < dims; ++t) {
            w *= rule.weights[idx[t]];
            const double xi = rule.nodes[idx[t]];
            const double x = sigma[t] * xi;
            xi2 += xi * xi;
            x2 += x * x;
            if ((t & 1) == 0)
                z[t / 2] = cxd{x, 0.0};
            else
                z[t / 2] += cxd{0.0, x};
        }
        // exp(-x^2) weight is implicit in w; restore the true exp(-|z|^2)
        const cxd integrand = std::conj(f1(z)) * f2(z) * std::exp(xi2 - x2);
        acc.add(w * integrand);

        int t = 0;
        while (t < dims && idx[t] == points - 1) idx[t++] = 0;
        if (t == dims) break;
        ++idx[t];
    }
    double pi_m = 1.0;
    for (int j = 0; j < m; ++j) pi_m *= M_PI;
    return jac / pi_m * acc.value();
}

} // namespace detail

/// Brute-force SB inner product (1/pi^m) Int exp(-|z|^2) F1*(z) F2(z) d^2m z.
inline cxd sb_inner_quadrature(const StellarFunction& f1, const StellarFunction& f2,
                               const QuadratureGrid& grid = {}) {
    if (f1.modes != f2.modes) throw ShapeError("sb_inner_quadrature: mode counts differ");
    if (f1.modes > 2)
        throw RangeError("sb_inner_quadrature: tensor quadrature supports m <= 2");
    if (grid.points_per_axis < 8 || grid.points_per_axis > 256)
        throw RangeError("sb_inner_quadrature: points per axis out of [8,256]");

    const cxd coarse = detail::gh_pass(f1, f2, grid.points_per_axis);
    if (grid.scheme == Scheme::TensorGaussHermite) return coarse;
    const cxd fine = detail::gh_pass(f1, f2, 2 * grid.points_per_axis);
    const double err = std::abs(fine - coarse);
    if (err > grid.tolerance * std::max(1.0, std::abs(fine)))
        throw AccuracyError("sb_inner_quadrature: estimated error " + format_double(err) +
                            " above tolerance");
    return fine;
}

/// Fock-basis route: sum of conj(psi1) psi2 over multi-indices up to K.
inline cxd sb_inner_fock(const StellarFunction& f1, const StellarFunction& f2, int K) {
    const FockVector p1 = stellar::fock_coefficients(f1, K);
    const FockVector p2 = stellar::fock_coefficients(f2, K);
    if (p1.tail_warning || p2.tail_warning)
        throw TruncationError("sb_inner_fock: K leaves more than 1e-9 of the norm behind");
    return stellar::fock_overlap(p1, p2);
}

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Finite-rank approximation bound: | |<psi1|psi2>|^2 - |<F1|F2>|^2 | must
/// not exceed 4 sqrt(2) max(eps1, eps2), given the fidelity premises.
inline BoundCheck infinite_rank_bound_check(const FockVector& psi1, const FockVector& psi2,
                                            const StellarFunction& f1, const StellarFunction& f2,
                                            double eps1, double eps2) {
    const int K = std::max(psi1.truncation, psi2.truncation);
    const FockVector fp1 = stellar::fock_coefficients(f1, std::min(K, 200));
    const FockVector fp2 = stellar::fock_coefficients(f2, std::min(K, 200));

    const double fid1 = std::norm(stellar::fock_overlap(psi1, fp1));
    const double fid2 = std::norm(stellar::fock_overlap(psi2, fp2));
    if (fid1 < 1.0 - eps1 * eps1 - 1e-12 || fid2 < 1.0 - eps2 * eps2 - 1e-12)
        throw PremiseError("infinite_rank_bound_check: fidelity premise violated");

    const double k_inf = std::norm(stellar::fock_overlap(psi1, psi2));
    const double k_fin = std::norm(stellar::fock_overlap(fp1, fp2));
    BoundCheck out;
    out.lhs = std::abs(k_inf - k_fin);
    out.rhs = 4.0 * std::sqrt(2.0) * std::max(eps1, eps2);
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

/// FockVector of a normalized cat state, truncated where amplitudes vanish.
inline FockVector cat_fock_vector(cxd alpha, stellar::CatParity parity, int kmax) {
    const auto amps = stellar::cat_fock_amplitudes(alpha, parity, kmax);
    FockVector out;
    out.modes = 1;
    out.truncation = kmax;
    for (int k = 0; k <= kmax; ++k) {
        if (amps[k] == cxd{0.0, 0.0}) continue;
        out.amplitudes[stellar::MultiIndex{std::vector<int>{k}}] = amps[k];
    }
    return out;
}

/// Bound scenario for a pair of cat states and their rank-N truncations. The
/// infinite-rank side comes from the analytic coherent overlaps, the finite
/// side from the truncated polynomial states.
inline BoundCheck cat_bound_scenario(cxd a1, stellar::CatParity p1, int n1, cxd a2,
                                     stellar::CatParity p2, int n2) {
    const auto t1 = stellar::encode_cat_truncated(a1, n1, p1);
    const auto t2 = stellar::encode_cat_truncated(a2, n2, p2);
    const double k_inf = std::norm(stellar::cat_overlap(a1, p1, a2, p2));
    const cxd fin = stellar::fock_overlap(stellar::fock_coefficients(t1.state, n1),
                                          stellar::fock_coefficients(t2.state, n2));
    const double k_fin = std::norm(fin);
    BoundCheck out;
    out.lhs = std::abs(k_inf - k_fin);
    out.rhs = 4.0 * std::sqrt(2.0) * std::max(t1.fidelity_deficit, t2.fidelity_deficit);
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

} // namespace cvkernel::oracle
