#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"

namespace cvkernel::stellar {

/// Exponent tuple (i_1..i_m) labelling the monomial z_1^{i_1}...z_m^{i_m}.
struct MultiIndex {
    std::vector<int> idx;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> v) : idx(std::move(v)) {}
    MultiIndex(std::initializer_list<int> v) : idx(v) {}

    int modes() const { return static_cast<int>(idx.size()); }
    int total() const { return std::accumulate(idx.begin(), idx.end(), 0); }
    int operator[](int k) const { return idx[static_cast<std::size_t>(k)]; }

    bool operator==(const MultiIndex& o) const { return idx == o.idx; }
};

/// Graded-lexicographic order; keeps sparse polynomial iteration deterministic.
struct GradedLex {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        const int ta = a.total(), tb = b.total();
        if (ta != tb) return ta < tb;
        return a.idx < b.idx;
    }
};

using BetaMap = std::map<MultiIndex, cxd, GradedLex>;

/// m-mode holomorphic feature map exp(-z^T A z / 2 + B^T z + C) * sum beta_i z^i.
struct StellarFunction {
    int modes = 1;
    std::vector<cxd> A; // m*m, row-major
    std::vector<cxd> B; // m
    cxd C{0.0, 0.0};
    BetaMap beta;
    int rank = 0;

    cxd a_at(int i, int j) const { return A[static_cast<std::size_t>(i) * modes + j]; }

    bool gaussian_trivial() const {
        for (const cxd& v : A)
            if (v != cxd{0.0, 0.0}) return false;
        for (const cxd& v : B)
            if (v != cxd{0.0, 0.0}) return false;
        return true;
    }

    /// Pointwise evaluation at z in C^m.
    cxd operator()(const std::vector<cxd>& z) const {
        cxd quad{0.0, 0.0};
        for (int i = 0; i < modes; ++i)
            for (int j = 0; j < modes; ++j) quad += a_at(i, j) * z[i] * z[j];
        cxd lin{0.0, 0.0};
        for (int i = 0; i < modes; ++i) lin += B[i] * z[i];
        cxd poly{0.0, 0.0};
        for (const auto& [mi, coeff] : beta) {
            cxd mono{1.0, 0.0};
            for (int k = 0; k < modes; ++k) mono *= pow_int(z[k], mi[k]);
            poly += coeff * mono;
        }
        return std::exp(-0.5 * quad + lin + C) * poly;
    }
};

/// Validates invariants and computes the (tight) stellar rank. Exact-zero
/// beta coefficients are dropped.
inline StellarFunction make_stellar(int m, std::vector<cxd> A, std::vector<cxd> B, cxd C,
                                    BetaMap beta) {
    if (m < 1) throw ShapeError("make_stellar: modes must be positive");
    if (A.size() != static_cast<std::size_t>(m) * m || B.size() != static_cast<std::size_t>(m))
        throw ShapeError("make_stellar: A/B dimensions do not match mode count");
    for (const cxd& v : A) require_finite(v, "StellarFunction A");
    for (const cxd& v : B) require_finite(v, "StellarFunction B");
    require_finite(C, "StellarFunction C");
    for (int j = 0; j < m; ++j)
        if (A[static_cast<std::size_t>(j) * m + j].real() <= -1.0)
            throw DomainError("make_stellar: Re(A_jj) <= -1 violates SB normalizability");

    BetaMap clean;
    int rank = -1;
    for (auto& [mi, coeff] : beta) {
        if (mi.modes() != m) throw ShapeError("make_stellar: multi-index length != modes");
        require_finite(coeff, "StellarFunction beta");
        if (coeff == cxd{0.0, 0.0}) continue;
        rank = std::max(rank, mi.total());
        clean.emplace(mi, coeff);
    }
    if (clean.empty()) throw DomainError("make_stellar: zero polynomial is not a state");

    StellarFunction f;
    f.modes = m;
    f.A = std::move(A);
    f.B = std::move(B);
    f.C = C;
    f.beta = std::move(clean);
    f.rank = rank;
    return f;
}

/// Fock amplitudes of a state, keyed by multi-index up to a total-degree cut.
struct FockVector {
    int modes = 1;
    int truncation = 0;
    std::map<MultiIndex, cxd, GradedLex> amplitudes;
    bool tail_warning = false; // truncation may be missing > 1e-9 of the norm

    double norm2() const {
        double s = 0.0;
        for (const auto& [mi, a] : amplitudes) s += std::norm(a);
        return s;
    }
    /// Single-mode convenience accessor (zero above truncation).
    cxd at(int k) const {
        auto it = amplitudes.find(MultiIndex{std::vector<int>{k}});
        return it == amplitudes.end() ? cxd{0.0, 0.0} : it->second;
    }
};

inline cxd fock_overlap(const FockVector& p1, const FockVector& p2) {
    if (p1.modes != p2.modes) throw ShapeError("fock_overlap: mode mismatch");
    KahanSum acc;
    for (const auto& [mi, a] : p1.amplitudes) {
        auto it = p2.amplitudes.find(mi);
        if (it != p2.amplitudes.end()) acc.add(std::conj(a) * it->second);
    }
    return acc.value();
}

namespace detail {

/// Taylor coefficients of exp(-z^T A z / 2 + B^T z + C) by total degree <= K,
/// via the derivative recurrence d_j E = (B_j - sum_k Asym_{jk} z_k) E.
inline std::map<MultiIndex, cxd, GradedLex> exp_series(const StellarFunction& f, int K) {
    const int m = f.modes;
    std::map<MultiIndex, cxd, GradedLex> e;
    std::vector<cxd> asym(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            asym[static_cast<std::size_t>(i) * m + j] = 0.5 * (f.a_at(i, j) + f.a_at(j, i));

    std::vector<int> nu(m, 0);
    e[MultiIndex{nu}] = std::exp(f.C);

    // enumerate multi-indices in graded order via an odometer over each shell
    std::function<void(int, int, std::vector<int>&)> shell = [&](int pos, int rem,
                                                                 std::vector<int>& cur) {
        if (pos == m - 1) {
            cur[pos] = rem;
            // first nonzero position drives the recurrence
            int j = 0;
            while (cur[j] == 0) ++j;
            std::vector<int> down = cur;
            down[j] -= 1;
            cxd val = f.B[j] * e.at(MultiIndex{down});
            for (int k = 0; k < m; ++k) {
                if (down[k] == 0) continue;
                std::vector<int> down2 = down;
                down2[k] -= 1;
                val -= asym[static_cast<std::size_t>(j) * m + k] * e.at(MultiIndex{down2});
            }
            e[MultiIndex{cur}] = val / static_cast<double>(cur[j]);
            cur[pos] = 0;
            return;
        }
        for (int v = rem; v >= 0; --v) {
            cur[pos] = v;
            shell(pos + 1, rem - v, cur);
        }
        cur[pos] = 0;
    };
    std::vector<int> cur(m, 0);
    for (int deg = 1; deg <= K; ++deg) shell(0, deg, cur);
    return e;
}

} // namespace detail

/// Fock amplitudes psi_i = sqrt(i!) * [z^i] F, via series expansion of the
/// Gaussian factor multiplied by the beta polynomial.
inline FockVector fock_coefficients(const StellarFunction& f, int K) {
    if (K < f.rank) throw RangeError("fock_coefficients: K below stellar rank");
    if (K > 200) throw RangeError("fock_coefficients: K out of [rank,200]");

    const int m = f.modes;
    std::map<MultiIndex, cxd, GradedLex> taylor;
    const bool terminating = f.gaussian_trivial();
    if (terminating) {
        const cxd scale = std::exp(f.C);
        for (const auto& [mi, c] : f.beta) taylor[mi] = scale * c;
    } else {
        auto e = detail::exp_series(f, K);
        for (const auto& [emi, ec] : e) {
            for (const auto& [bmi, bc] : f.beta) {
                std::vector<int> sum(m);
                int tot = 0;
                for (int k = 0; k < m; ++k) {
                    sum[k] = emi[k] + bmi[k];
                    tot += sum[k];
                }
                if (tot > K) continue;
                taylor[MultiIndex{sum}] += ec * bc;
            }
        }
    }

    FockVector out;
    out.modes = m;
    out.truncation = K;
    double total = 0.0, top_shell = 0.0;
    for (const auto& [mi, c] : taylor) {
        double lf = 0.0;
        for (int k = 0; k < m; ++k) lf += log_factorial(mi[k]);
        const cxd amp = c * std::exp(0.5 * lf);
        require_finite(amp, "fock_coefficients amplitude");
        out.amplitudes[mi] = amp;
        const double mass = std::norm(amp);
        total += mass;
        if (mi.total() == K) top_shell += mass;
    }
    out.tail_warning = !terminating && total > 0.0 && top_shell > 1e-9 * total;
    return out;
}

/// Shifts C so the self inner product becomes 1 (Parseval over Fock shells).
inline StellarFunction normalize(const StellarFunction& f) {
    int K = std::max(4 * f.rank, 40);
    K = std::min(K, 200);
    FockVector ps = fock_coefficients(f, K);
    while (ps.tail_warning && K < 200) {
        K = std::min(200, K + 40);
        ps = fock_coefficients(f, K);
    }
    const double n2 = ps.norm2();
    if (!std::isfinite(n2) || n2 <= 0.0)
        throw DomainError("normalize: self inner product not finite and positive");
    StellarFunction g = f;
    g.C -= 0.5 * std::log(n2);
    return g;
}

/// Displaced Fock encoding of a 2-D point: alpha = c (x1 + i x2), state
/// D(alpha)|n> with stellar function exp(alpha z - |alpha|^2/2)(z-alpha*)^n/sqrt(n!).
inline StellarFunction encode_displaced_fock(double x1, double x2, int n, double c) {
    if (n < 0 || n > 20) throw RangeError("encode_displaced_fock: n out of [0,20]");
    if (!(c > 0.0)) throw DomainError("encode_displaced_fock: bandwidth must be positive");
    const cxd alpha = c * cxd{x1, x2};
    const cxd malpha_conj = -std::conj(alpha);
    const double inv_sqrt_nfact = 1.0 / std::sqrt(factorial(n));
    BetaMap beta;
    for (int j = 0; j <= n; ++j) {
        const cxd coeff = binomial(n, j) * pow_int(malpha_conj, n - j) * inv_sqrt_nfact;
        if (coeff != cxd{0.0, 0.0}) beta[MultiIndex{std::vector<int>{j}}] = coeff;
    }
    return make_stellar(1, {cxd{0.0, 0.0}}, {alpha}, -0.5 * std::norm(alpha), std::move(beta));
}

/// Qudit amplitudes to a single-mode polynomial state, beta_j = alpha_j/sqrt(j!).
inline StellarFunction encode_qudit(const std::vector<cxd>& amps) {
    if (amps.empty() || amps.size() > 32) throw RangeError("encode_qudit: d out of [1,32]");
    double n2 = 0.0;
    for (const cxd& a : amps) {
        require_finite(a, "encode_qudit amplitude");
        n2 += std::norm(a);
    }
    if (std::abs(n2 - 1.0) > 1e-9)
        throw NormalizationError("encode_qudit: amplitudes are not normalized");
    BetaMap beta;
    for (int j = 0; j < static_cast<int>(amps.size()); ++j) {
        if (amps[j] == cxd{0.0, 0.0}) continue;
        beta[MultiIndex{std::vector<int>{j}}] = amps[j] / std::sqrt(factorial(j));
    }
    return make_stellar(1, {cxd{0.0, 0.0}}, {cxd{0.0, 0.0}}, cxd{0.0, 0.0}, std::move(beta));
}

enum class CatParity { Even, Odd };

/// Normalized Fock amplitudes of (|alpha> +/- |-alpha>)/sqrt(N), up to level kmax.
inline std::vector<cxd> cat_fock_amplitudes(cxd alpha, CatParity parity, int kmax) {
    const double a2 = std::norm(alpha);
    const double sign = parity == CatParity::Even ? 1.0 : -1.0;
    const double norm = 2.0 * (1.0 + sign * std::exp(-2.0 * a2));
    if (norm <= 1e-300)
        throw DegenerateStateError("cat_fock_amplitudes: cat state has zero norm");
    std::vector<cxd> amps(static_cast<std::size_t>(kmax) + 1, cxd{0.0, 0.0});
    for (int k = (parity == CatParity::Even ? 0 : 1); k <= kmax; k += 2) {
        // 2 e^{-|a|^2/2} alpha^k / sqrt(k!), in log magnitude to dodge overflow
        const double logmag = -0.5 * a2 + k * 0.5 * std::log(a2 == 0.0 ? 1e-300 : a2) -
                              0.5 * log_factorial(k) + std::log(2.0) - 0.5 * std::log(norm);
        const double phase = k * std::arg(alpha);
        amps[k] = std::exp(logmag) * cxd{std::cos(phase), std::sin(phase)};
    }
    return amps;
}

struct CatTruncation {
    StellarFunction state;
    double fidelity_deficit = 0.0; // sqrt(1 - |<cat|trunc>|^2)
};

/// Truncates the normalized cat state to Fock levels 0..N and renormalizes.
inline CatTruncation encode_cat_truncated(cxd alpha, int N, CatParity parity) {
    if (std::abs(alpha) > 4.0) throw RangeError("encode_cat_truncated: |alpha| > 4");
    if (N < 0 || N > 40) throw RangeError("encode_cat_truncated: N out of [0,40]");
    const auto amps = cat_fock_amplitudes(alpha, parity, N);
    double kept = 0.0;
    for (const cxd& a : amps) kept += std::norm(a);
    if (kept <= 1e-300)
        throw DegenerateStateError("encode_cat_truncated: truncation removed all amplitude");
    const double scale = 1.0 / std::sqrt(kept);
    BetaMap beta;
    for (int k = 0; k <= N; ++k) {
        if (amps[k] == cxd{0.0, 0.0}) continue;
        beta[MultiIndex{std::vector<int>{k}}] = scale * amps[k] / std::sqrt(factorial(k));
    }
    CatTruncation out;
    out.state = make_stellar(1, {cxd{0.0, 0.0}}, {cxd{0.0, 0.0}}, cxd{0.0, 0.0}, std::move(beta));
    out.fidelity_deficit = std::sqrt(std::max(0.0, 1.0 - kept));
    return out;
}

/// Coherent-state overlap <alpha|beta>.
inline cxd coherent_overlap(cxd alpha, cxd beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

/// Analytic overlap of two normalized cat states.
inline cxd cat_overlap(cxd a1, CatParity p1, cxd a2, CatParity p2) {
    const double s1 = p1 == CatParity::Even ? 1.0 : -1.0;
    const double s2 = p2 == CatParity::Even ? 1.0 : -1.0;
    const double n1 = 2.0 * (1.0 + s1 * std::exp(-2.0 * std::norm(a1)));
    const double n2 = 2.0 * (1.0 + s2 * std::exp(-2.0 * std::norm(a2)));
    const cxd raw = coherent_overlap(a1, a2) + s2 * coherent_overlap(a1, -a2) +
                    s1 * coherent_overlap(-a1, a2) + s1 * s2 * coherent_overlap(-a1, -a2);
    return raw / std::sqrt(n1 * n2);
}

} // namespace cvkernel::stellar
