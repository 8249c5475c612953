#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cvkernel/errors.hpp"

namespace cvkernel {

using cxd = std::complex<double>;

inline bool is_finite(cxd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(cxd z, const char* what) {
    if (!is_finite(z)) throw DomainError(std::string(what) + ": non-finite value");
}

/// n! as a double; exact up to n = 170, RangeError beyond.
inline double factorial(int n) {
    if (n < 0 || n > 170) throw RangeError("factorial: n out of [0,170]");
    static const std::vector<double> table = [] {
        std::vector<double> t(171);
        t[0] = 1.0;
        for (int k = 1; k <= 170; ++k) t[k] = t[k - 1] * k;
        return t;
    }();
    return table[n];
}

inline double log_factorial(int n) {
    if (n < 0) throw RangeError("log_factorial: negative n");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    if (n <= 170) return factorial(n) / (factorial(k) * factorial(n - k));
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

/// Exact integer binomial; overflows unsigned long long only past C(62,31).
inline unsigned long long binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0ULL;
    k = std::min(k, n - k);
    unsigned long long r = 1ULL;
    for (int i = 1; i <= k; ++i) {
        // divides exactly at every step
        r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
    }
    return r;
}

/// Pochhammer symbol (b)_j for real b.
inline double pochhammer(double b, int j) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= (b + i);
    return p;
}

inline cxd pow_int(cxd z, int n) {
    if (n < 0) return 1.0 / pow_int(z, -n);
    cxd r = 1.0, base = z;
    while (n > 0) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

/// Compensated (Kahan) accumulator for complex sums.
struct KahanSum {
    cxd sum{0.0, 0.0};
    cxd comp{0.0, 0.0};

    void add(cxd v) {
        cxd y = v - comp;
        cxd t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    cxd value() const { return sum; }
};

/// Deterministic RNG: mt19937_64 with fixed mappings so streams do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return mean + stddev * r * std::cos(th);
    }

    int uniform_int(int lo, int hi) { // inclusive bounds
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    cxd complex_in_disk(double radius) {
        while (true) {
            const double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
            if (x * x + y * y <= 1.0) return radius * cxd{x, y};
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Minimum eigenvalue of a symmetric matrix (row-major, n x n) via cyclic Jacobi.
inline double symmetric_min_eigenvalue(std::vector<double> a, int n) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double mn = at(0, 0);
    for (int i = 1; i < n; ++i) mn = std::min(mn, at(i, i));
    return mn;
}

/// FNV-1a over a byte string; used for provenance hashes.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace cvkernel
