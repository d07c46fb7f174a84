#pragma once

#include "sigmak/bigint.hpp"
#include "sigmak/log_rational.hpp"
#include "sigmak/parallel.hpp"
#include "sigmak/primality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace sigmak {

struct PrimePower {
    u64 p = 0;
    unsigned a = 0;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-power decomposition of a positive integer, primes strictly increasing.
class Factorization {
public:
    Factorization() = default;

    /// Validates the invariants; throws PreconditionError when violated.
    Factorization(u64 n, std::vector<PrimePower> factors) : n_(n), factors_(std::move(factors)) {
        if (n_ == 0) throw PreconditionError("factorization of zero");
        u128 prod = 1;
        u64 prev = 0;
        for (const auto& f : factors_) {
            if (f.a == 0 || f.p <= prev || !is_prime(f.p))
                throw PreconditionError("invalid factor list for " + std::to_string(n_));
            prev = f.p;
            for (unsigned i = 0; i < f.a; ++i) {
                prod *= f.p;
                if (prod > n_) throw PreconditionError("factor product exceeds n");
            }
        }
        if (prod != n_) throw PreconditionError("factor product differs from n");
    }

    u64 n() const { return n_; }
    const std::vector<PrimePower>& factors() const { return factors_; }

    unsigned valuation(u64 p) const {
        for (const auto& f : factors_)
            if (f.p == p) return f.a;
        return 0;
    }

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    u64 n_ = 1;
    std::vector<PrimePower> factors_;
};

namespace detail {

inline u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    // deterministic sequence of (c, x0) pairs
    for (u64 c = 1;; ++c) {
        u64 y = 2, g = 1, q = 1, x = 0, ys = 0;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void split_into(u64 n, std::vector<u64>& primes) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    const u64 d = pollard_brent(n);
    split_into(d, primes);
    split_into(n / d, primes);
}

}  // namespace detail

/// Trial division below 2^16, then Pollard-Brent rho on the cofactor.
inline Factorization factorize(u64 n) {
    if (n == 0) throw PreconditionError("factorize requires n >= 1");
    std::vector<PrimePower> out;
    const u64 original = n;
    auto take = [&](u64 p) {
        unsigned a = 0;
        while (n % p == 0) {
            n /= p;
            ++a;
        }
        if (a) out.push_back({p, a});
    };
    take(2);
    for (u64 p = 3; p < (1u << 16) && p * p <= n; p += 2) take(p);
    if (n > 1) {
        if (n < (u64{1} << 32) || is_prime(n)) {
            // no factor below 2^16 and n < 2^32, or n prime
            out.push_back({n, 1});
        } else {
            std::vector<u64> ps;
            detail::split_into(n, ps);
            std::sort(ps.begin(), ps.end());
            for (std::size_t i = 0; i < ps.size();) {
                std::size_t j = i;
                while (j < ps.size() && ps[j] == ps[i]) ++j;
                out.push_back({ps[i], static_cast<unsigned>(j - i)});
                i = j;
            }
        }
    }
    return Factorization(original, std::move(out));
}

/// sigma(p^a) = 1 + p + ... + p^a, exact.
inline BigInt sigma_prime_power(u64 p, unsigned a) {
    BigInt s = 1, pw = 1;
    for (unsigned i = 0; i < a; ++i) {
        pw *= p;
        s += pw;
    }
    return s;
}

inline BigInt pow_big(u64 p, unsigned a) {
    BigInt r = 1;
    for (unsigned i = 0; i < a; ++i) r *= p;
    return r;
}

/// Sum of divisors, exact for every 64-bit input.
inline BigInt sigma(const Factorization& f) {
    BigInt s = 1;
    for (const auto& pp : f.factors()) s *= sigma_prime_power(pp.p, pp.a);
    return s;
}

/// Sum of divisors when it fits in 64 bits; nullopt on overflow (use sigma()).
inline std::optional<u64> sigma_u64(const Factorization& f) {
    u128 s = 1;
    constexpr u128 limit = std::numeric_limits<u64>::max();
    for (const auto& pp : f.factors()) {
        u128 term = 1, pw = 1;
        for (unsigned i = 0; i < pp.a; ++i) {
            pw *= pp.p;
            term += pw;
            if (term > limit) return std::nullopt;
        }
        s *= term;
        if (s > limit) return std::nullopt;
    }
    return static_cast<u64>(s);
}

/// ell(p^a) = log(sigma(p^a) / p^a); ell(p^0) = 0.
inline LogRational ell(u64 p, unsigned a) {
    if (a == 0) return LogRational::zero();
    return LogRational(sigma_prime_power(p, a), pow_big(p, a));
}

/// g(n) = log(sigma(n) / n), the sum of ell over the prime powers of n.
inline LogRational g(const Factorization& f) {
    LogRational out;
    for (const auto& pp : f.factors()) out += ell(pp.p, pp.a);
    return out;
}

/// All divisors in ascending order.
inline std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> ds{1};
    for (const auto& pp : f.factors()) {
        const std::size_t base = ds.size();
        u64 pw = 1;
        for (unsigned i = 0; i < pp.a; ++i) {
            pw *= pp.p;
            for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pw);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

inline unsigned valuation(u64 n, u64 p) {
    unsigned a = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++a;
    }
    return a;
}

struct SigmaTable {
    u64 lo = 1;
    u64 hi = 0;
    std::vector<u64> values;

    u64 at(u64 n) const { return values.at(n - lo); }
    std::size_t size() const { return values.size(); }
};

struct SieveConfig {
    u64 segment_size = u64{1} << 18;
    /// largest table the sieve will materialise, in entries
    u64 max_entries = u64{1} << 26;
    Threads threads = Threads::serial();
};

namespace detail {

inline u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// sigma over [a, b] into out[0 .. b-a], pairing each divisor d <= sqrt(m)
/// with its cofactor m/d.
inline void sigma_segment(u64 a, u64 b, u64* out) {
    std::fill(out, out + (b - a + 1), u64{0});
    const u64 root = isqrt(b);
    for (u64 d = 1; d <= root; ++d) {
        u64 q = std::max(d, (a + d - 1) / d);
        u64 m = d * q;
        if (m == d * d && m >= a) {
            out[m - a] += d;
            m += d;
            ++q;
        }
        for (; m <= b; m += d, ++q) out[m - a] += d + q;
    }
}

}  // namespace detail

/// Exact sigma(n) for n in [lo, hi]. Output is independent of segmentation
/// and thread count.
inline SigmaTable sigma_sieve(u64 lo, u64 hi, const SieveConfig& cfg = {}) {
    if (lo < 1 || hi < lo) throw PreconditionError("sigma_sieve requires 1 <= lo <= hi");
    if (cfg.segment_size == 0) throw PreconditionError("segment_size must be positive");
    if (hi - lo >= cfg.max_entries)
        throw BudgetError("sigma_sieve range of " + std::to_string(hi - lo + 1) +
                          " entries exceeds budget of " + std::to_string(cfg.max_entries));
    SigmaTable t{lo, hi, std::vector<u64>(hi - lo + 1)};
    const u64 len = hi - lo + 1;
    const std::size_t blocks = (len + cfg.segment_size - 1) / cfg.segment_size;
    parallel_blocks(blocks, cfg.threads, [&](std::size_t i) {
        const u64 a = lo + i * cfg.segment_size;
        const u64 b = std::min(hi, a + cfg.segment_size - 1);
        detail::sigma_segment(a, b, t.values.data() + (a - lo));
    });
    return t;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct ThetaReport {
    u64 x = 0;
    double theta = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// Chebyshev theta(x) = sum of log p over p <= x, against 1.02 x.
inline ThetaReport theta_check(u64 x) {
    if (x < 2) throw PreconditionError("theta_check requires x >= 2");
    CompensatedSum s;
    for (u64 p : primes_up_to(x)) s.add(std::log(static_cast<double>(p)));
    const double bound = 1.02 * static_cast<double>(x);
    return {x, s.value(), bound, s.value() < bound};
}

/// theta(x) < 1.02 x checked at every prime up to x (where theta jumps).
/// Returns the first prime at which it fails, or nullopt.
inline std::optional<u64> theta_first_failure(u64 x) {
    CompensatedSum s;
    for (u64 p : primes_up_to(x)) {
        s.add(std::log(static_cast<double>(p)));
        if (!(s.value() < 1.02 * static_cast<double>(p))) return p;
    }
    return std::nullopt;
}

struct MertensReport {
    u64 x = 0;
    double sum = 0.0;
    double loglog = 0.0;
    /// sum - log log x, the running estimate of the Meissel-Mertens constant
    double delta = 0.0;
};

inline MertensReport mertens_report(u64 x) {
    if (x < 3) throw PreconditionError("mertens_report requires x >= 3");
    CompensatedSum s;
    for (u64 p : primes_up_to(x)) s.add(1.0 / static_cast<double>(p));
    const double ll = std::log(std::log(static_cast<double>(x)));
    return {x, s.value(), ll, s.value() - ll};
}

}  // namespace sigmak
