#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "cvkernel/errors.hpp"
#include "cvkernel/numeric.hpp"
#include "cvkernel/special.hpp"
#include "cvkernel/stellar.hpp"

namespace cvkernel::engine {

using stellar::StellarFunction;

struct Options {
    long long term_budget = 50'000'000; // modeled nested-sum leaves per entry
};

struct EvalStats {
    long long terms = 0;
};

/// Quadratic/linear/cross coefficients of the 2m real integration variables:
/// a[j], b[j] for j = 1..2m and upper-triangular d[j][k], j < k.
struct SeedParams {
    int two_m = 2;
    std::vector<cxd> a, b;            // 1-based, slot 0 unused
    std::vector<std::vector<cxd>> d;  // d[j][k], 1 <= j < k <= 2m
};

/// Builds the seed coefficients from the exponent of F1* F2 e^{-|z|^2},
/// split into real (odd index) and imaginary (even index) directions.
inline SeedParams seed(const StellarFunction& f1, const StellarFunction& f2) {
    if (f1.modes != f2.modes) throw ShapeError("seed: mode counts differ");
    const int m = f1.modes;
    if (m > 3) throw RangeError("seed: more than 3 modes not supported");
    const int n2m = 2 * m;

    auto a1c = [&](int i, int j) { return std::conj(f1.a_at(i - 1, j - 1)); };
    auto a2v = [&](int i, int j) { return f2.a_at(i - 1, j - 1); };
    // symmetrized off-diagonal couplings of each quadratic form
    auto s1 = [&](int i, int j) { return a1c(i, j) + a1c(j, i); };
    auto s2 = [&](int i, int j) { return a2v(i, j) + a2v(j, i); };

    SeedParams sp;
    sp.two_m = n2m;
    sp.a.assign(n2m + 1, cxd{});
    sp.b.assign(n2m + 1, cxd{});
    sp.d.assign(n2m + 1, std::vector<cxd>(n2m + 1, cxd{}));

    const cxd iu{0.0, 1.0};
    for (int j = 1; j <= n2m; ++j) {
        if (j & 1) {
            const int jm = (j + 1) / 2;
            sp.a[j] = 1.0 + 0.5 * (a1c(jm, jm) + a2v(jm, jm));
            sp.b[j] = std::conj(f1.B[jm - 1]) + f2.B[jm - 1];
        } else {
            const int jm = j / 2;
            sp.a[j] = 1.0 - 0.5 * (a1c(jm, jm) + a2v(jm, jm));
            sp.b[j] = -iu * (std::conj(f1.B[jm - 1]) - f2.B[jm - 1]);
        }
        if (sp.a[j].real() <= 0.0)
            throw DivergentIntegralError("seed: Re(a) <= 0, SB integral diverges");
    }
    for (int j = 1; j <= n2m; ++j) {
        for (int k = j + 1; k <= n2m; ++k) {
            cxd v;
            if ((j & 1) && k == j + 1) {
                // same mode, real x imaginary cross term
                const int jm = (j + 1) / 2;
                v = iu * (a1c(jm, jm) - a2v(jm, jm));
            } else if ((j & 1) && (k & 1)) {
                v = -0.5 * (s1((j + 1) / 2, (k + 1) / 2) + s2((j + 1) / 2, (k + 1) / 2));
            } else if ((j & 1) && !(k & 1)) {
                v = 0.5 * iu * (s1((j + 1) / 2, k / 2) - s2((j + 1) / 2, k / 2));
            } else if (!(j & 1) && (k & 1)) {
                v = 0.5 * iu * (s1(j / 2, (k + 1) / 2) - s2(j / 2, (k + 1) / 2));
            } else {
                v = 0.5 * (s1(j / 2, k / 2) + s2(j / 2, k / 2));
            }
            sp.d[j][k] = v;
        }
    }
    return sp;
}

/// Level-by-level elimination tables. pivot_a[l] = a_{l-1,l} etc.; all the
/// nested sums consume only the pivot rows.
struct RecursionTables {
    int two_m = 2;
    std::vector<cxd> pivot_a, pivot_b;       // 1-based, l = 1..2m
    std::vector<std::vector<cxd>> pivot_d;   // pivot_d[l][k], k = l+1..2m
    std::vector<cxd> pivot_sqrt_a;
};

inline RecursionTables build_tables(const SeedParams& sp) {
    const int n2m = sp.two_m;
    std::vector<cxd> a = sp.a, b = sp.b;
    std::vector<std::vector<cxd>> d = sp.d;

    RecursionTables t;
    t.two_m = n2m;
    t.pivot_a.assign(n2m + 1, cxd{});
    t.pivot_b.assign(n2m + 1, cxd{});
    t.pivot_sqrt_a.assign(n2m + 1, cxd{});
    t.pivot_d.assign(n2m + 1, std::vector<cxd>(n2m + 1, cxd{}));

    for (int l = 1; l <= n2m; ++l) {
        // a, b, d currently hold level l-1 values
        if (a[l].real() <= 0.0)
            throw DivergentIntegralError("recursion drove Re(a) <= 0 at level " +
                                         std::to_string(l));
        t.pivot_a[l] = a[l];
        t.pivot_b[l] = b[l];
        t.pivot_sqrt_a[l] = std::sqrt(a[l]);
        for (int k = l + 1; k <= n2m; ++k) t.pivot_d[l][k] = d[l][k];

        const cxd al = a[l], bl = b[l];
        for (int j = l + 1; j <= n2m; ++j) {
            a[j] -= d[l][j] * d[l][j] / (4.0 * al);
            b[j] += bl * d[l][j] / (2.0 * al);
        }
        for (int j = l + 1; j <= n2m; ++j)
            for (int k = j + 1; k <= n2m; ++k) d[j][k] += d[l][j] * d[l][k] / (2.0 * al);
    }
    return t;
}

namespace detail {

inline int rank_guard(int m) {
    switch (m) {
        case 1: return 8;
        case 2: return 4;
        default: return 3;
    }
}

/// Depth-first evaluation of the product of sums; results memoized per
/// exponent seed vector since the tables are fixed for one pair.
class NestedSum {
public:
    NestedSum(const RecursionTables& t, long long budget)
        : t_(t), budget_(budget), r_(static_cast<std::size_t>(t.two_m) + 1, 0) {}

    cxd eval(const std::vector<int>& r0, long long& terms_out) {
        auto it = memo_.find(r0);
        if (it != memo_.end()) {
            terms_out += it->second.second;
            check_budget(terms_out);
            return it->second.first;
        }
        for (int k = 1; k <= t_.two_m; ++k) r_[k] = r0[k - 1];
        terms_ = 0;
        const cxd v = level(1);
        memo_.emplace(r0, std::make_pair(v, terms_));
        terms_out += terms_;
        check_budget(terms_out);
        return v;
    }

private:
    void check_budget(long long terms) const {
        if (terms > budget_) throw BudgetError("nested-sum term budget exceeded");
    }

    // 1 / a^{(r+s+1)/2} with r+s even; principal branch of sqrt(a)
    cxd inv_half_power(int l, int rs) const {
        return 1.0 / (pow_int(t_.pivot_a[l], rs / 2) * t_.pivot_sqrt_a[l]);
    }

    cxd level(int l) {
        const int n2m = t_.two_m;
        const int rl = r_[l];
        const cxd bl = t_.pivot_b[l];
        KahanSum acc;
        if (l == n2m) {
            for (int s = rl & 1; s <= rl; s += 2) {
                ++terms_;
                acc.add(special::gamma_coeff(rl, s) * inv_half_power(l, rl + s) *
                        pow_int(bl, s));
            }
            return acc.value();
        }
        const int slots = n2m - l;
        std::vector<int> u(static_cast<std::size_t>(slots), 0);
        for (int s = rl & 1; s <= rl; s += 2) {
            const cxd base = special::gamma_coeff(rl, s) * inv_half_power(l, rl + s);
            for (int tt = 0; tt <= s; ++tt) {
                const cxd bt = factorial(s) / factorial(s - tt) * pow_int(bl, s - tt);
                // compositions of tt over slots l+1..2m, first slot fastest (colex)
                compose(l, 0, tt, u, base * bt, acc);
            }
        }
        return acc.value();
    }

    void compose(int l, int pos, int rem, std::vector<int>& u, cxd partial, KahanSum& acc) {
        const int slots = t_.two_m - l;
        if (pos == slots - 1) {
            u[pos] = rem;
            cxd w = partial;
            for (int kk = 0; kk < slots; ++kk) {
                const int k = l + 1 + kk;
                w *= pow_int(t_.pivot_d[l][k], u[kk]) / factorial(u[kk]);
                r_[k] += u[kk];
            }
            acc.add(w * level(l + 1));
            for (int kk = 0; kk < slots; ++kk) r_[l + 1 + kk] -= u[kk];
            u[pos] = 0;
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            u[pos] = v;
            compose(l, pos + 1, rem - v, u, partial, acc);
        }
        u[pos] = 0;
    }

    const RecursionTables& t_;
    long long budget_;
    long long terms_ = 0;
    std::vector<int> r_;
    std::map<std::vector<int>, std::pair<cxd, long long>> memo_;
};

inline cxd i_power(int k) { // i^k
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

} // namespace detail

/// SB inner product <F1|F2> via the closed-form nested sums.
inline cxd inner_product(const StellarFunction& f1, const StellarFunction& f2,
                         const Options& opts = {}, EvalStats* stats = nullptr) {
    if (f1.modes != f2.modes) throw ShapeError("inner_product: mode counts differ");
    const int m = f1.modes;
    if (m > 3) throw RangeError("inner_product: more than 3 modes not supported");
    const int guard = detail::rank_guard(m);
    if (std::max(f1.rank, f2.rank) > guard)
        throw BudgetError("inner_product: stellar rank exceeds cost guard for m=" +
                          std::to_string(m));

    const SeedParams sp = seed(f1, f2);
    const RecursionTables tables = build_tables(sp);

    cxd exponent = std::conj(f1.C) + f2.C;
    for (int j = 1; j <= 2 * m; ++j)
        exponent += tables.pivot_b[j] * tables.pivot_b[j] / (4.0 * tables.pivot_a[j]);

    detail::NestedSum nested(tables, opts.term_budget);
    long long terms = 0;
    KahanSum acc;
    std::vector<int> r0(static_cast<std::size_t>(2 * m), 0);
    std::vector<int> p(static_cast<std::size_t>(m), 0), q(static_cast<std::size_t>(m), 0);

    for (const auto& [mi, c1] : f1.beta) {
        for (const auto& [mj, c2] : f2.beta) {
            const cxd cc = std::conj(c1) * c2;
            std::fill(p.begin(), p.end(), 0);
            while (true) { // odometer over 0 <= p <= mi
                std::fill(q.begin(), q.end(), 0);
                while (true) { // odometer over 0 <= q <= mj
                    ++terms;
                    double gmag = 1.0;
                    int ipow = 0;
                    for (int k = 0; k < m; ++k) {
                        gmag *= binomial(mi[k], p[k]) * binomial(mj[k], q[k]);
                        ipow += q[k] - p[k];
                        r0[2 * k] = mi[k] + mj[k] - p[k] - q[k];
                        r0[2 * k + 1] = p[k] + q[k];
                    }
                    const cxd g = gmag * detail::i_power(ipow);
                    acc.add(cc * g * nested.eval(r0, terms));

                    int k = 0;
                    while (k < m && q[k] == mj[k]) q[k++] = 0;
                    if (k == m) break;
                    ++q[k];
                }
                int k = 0;
                while (k < m && p[k] == mi[k]) p[k++] = 0;
                if (k == m) break;
                ++p[k];
            }
        }
    }
    if (stats) stats->terms = terms;
    const cxd result = std::exp(exponent) * acc.value();
    require_finite(result, "inner_product result");
    return result;
}

/// CV quantum kernel |<F1|F2>|^2.
inline double kernel(const StellarFunction& f1, const StellarFunction& f2,
                     const Options& opts = {}, EvalStats* stats = nullptr) {
    return std::norm(inner_product(f1, f2, opts, stats));
}

/// Fast path for qudit encodings: sum_j conj(a1_j) a2_j.
inline cxd qudit_inner(const std::vector<cxd>& amps1, const std::vector<cxd>& amps2) {
    if (amps1.size() != amps2.size()) throw ShapeError("qudit_inner: length mismatch");
    KahanSum acc;
    for (std::size_t j = 0; j < amps1.size(); ++j) acc.add(std::conj(amps1[j]) * amps2[j]);
    return acc.value();
}

} // namespace cvkernel::engine
