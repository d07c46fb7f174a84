#pragma once

#include "sigmak/arith.hpp"
#include "sigmak/solutions.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sigmak {

/// Cutoffs of the truncated additive function: primes p <= y, exponents
/// capped at r, and the error scale eps.
class TruncationParams {
public:
    TruncationParams(u64 y, unsigned r, double eps) : y_(y), r_(r), eps_(eps) {
        if (y < 2) throw PreconditionError("truncation requires y >= 2");
        if (r < 1) throw PreconditionError("truncation requires r >= 1");
        if (!(eps > 0.0)) throw PreconditionError("truncation requires eps > 0");
        small_primes_ = primes_up_to(y);
        period_ = 1;
        for (u64 p : small_primes_) period_ *= pow_big(p, r);
        const double cap = 1.0 / (13.0 * eps);
        for (u64 p : small_primes_)
            if (p >= 5 && static_cast<double>(p) <= cap) effective_primes_.push_back(p);
    }

    u64 y() const { return y_; }
    unsigned r() const { return r_; }
    double eps() const { return eps_; }
    /// M = prod_{p <= y} p^r, the period of D.
    const BigInt& period() const { return period_; }
    const std::vector<u64>& small_primes() const { return small_primes_; }
    /// primes 5 <= p <= min(y, 1/(13 eps))
    const std::vector<u64>& effective_primes() const { return effective_primes_; }

    /// log M = r theta(y)
    double log_period() const { return log_big(period_); }
    /// whether log M < 1.02 r y holds for these parameters
    bool period_within_chebyshev() const { return log_period() < 1.02 * r_ * static_cast<double>(y_); }

private:
    u64 y_;
    unsigned r_;
    double eps_;
    BigInt period_;
    std::vector<u64> small_primes_;
    std::vector<u64> effective_primes_;
};

/// h_{y,r}(n) = sum over p <= y of ell(p^min(v_p(n), r)).
inline LogRational h_trunc(u64 n, const TruncationParams& params) {
    if (n < 1) throw PreconditionError("h_trunc requires n >= 1");
    LogRational out;
    for (u64 p : params.small_primes()) {
        const unsigned a = std::min(valuation(n, p), params.r());
        if (a) out += ell(p, a);
    }
    return out;
}

/// g_{>y}(n) = sum over p > y of ell(p^v_p(n)).
inline LogRational g_tail(u64 n, u64 y) {
    if (n < 1) throw PreconditionError("g_tail requires n >= 1");
    LogRational out;
    const auto f = factorize(n);
    for (const auto& pp : f.factors())
        if (pp.p > y) out += ell(pp.p, pp.a);
    return out;
}

/// D_{y,r}(n) = h_{y,r}(n+1) - h_{y,r}(n).
inline LogRational D(u64 n, const TruncationParams& params) {
    return h_trunc(n + 1, params) - h_trunc(n, params);
}

struct ErrorSetCounts {
    u64 e0 = 0;
    u64 e1 = 0;
    u64 e2 = 0;
    u64 s = 0;
    /// size of E0 u E1 u E2 u S
    u64 union_all = 0;
};

struct ErrorSetBounds {
    double e0_bound = 0.0;        // 1/eps
    double e1_bound_shape = 0.0;  // x / (eps y log y)
    double e2_bound_shape = 0.0;  // x 2^-r
    double e2_union_bound = 0.0;  // sum_{p<=y} 2 floor((x+1)/p^(r+1))
    /// x P(|W - log k| <= 3 eps) + M with the probability taken over one full
    /// period; nullopt when the period exceeds the enumeration budget
    std::optional<double> s_model;
};

struct ErrorSetReport {
    u64 x = 0;
    u64 k = 0;
    u64 y = 0;
    unsigned r = 0;
    double eps = 0.0;
    ErrorSetCounts counts;
    ErrorSetBounds bounds;
};

struct ErrorSetConfig {
    u64 max_x = 100'000'000;
    u64 period_budget = 10'000'000;
    u64 block = u64{1} << 16;
    Threads threads = Threads::serial();
    /// guard band added to 3 eps in the S test; borderline n count as members
    double s_guard = 1e-9;
};

namespace detail {

/// Per-n data for a block: truncated h as a double, tail g_{>y} as a double,
/// and whether some p <= y appears with exponent above r.
struct TruncBlock {
    std::vector<double> h;
    std::vector<double> tail;
    std::vector<unsigned char> over_cap;
};

inline double ell_double(u64 p, unsigned a) {
    if (a == 0) return 0.0;
    const double pd = static_cast<double>(p);
    return std::log1p(-std::pow(pd, -static_cast<double>(a + 1))) - std::log1p(-1.0 / pd);
}

class TruncTables {
public:
    explicit TruncTables(const TruncationParams& params) : params_(params) {
        for (u64 p : params.small_primes()) {
            std::vector<double> row(params.r() + 1, 0.0);
            for (unsigned a = 1; a <= params.r(); ++a) row[a] = ell(p, a).value();
            small_.push_back(std::move(row));
        }
    }

    /// Fills data for m in [a, b] with a segmented factor sieve.
    TruncBlock compute(u64 a, u64 b, const std::vector<u64>& sieve_primes) const {
        const std::size_t len = b - a + 1;
        TruncBlock blk{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0),
                       std::vector<unsigned char>(len, 0)};
        std::vector<u64> rem(len);
        for (std::size_t i = 0; i < len; ++i) rem[i] = a + i;
        const auto& small = params_.small_primes();
        for (std::size_t pi = 0; pi < sieve_primes.size(); ++pi) {
            const u64 p = sieve_primes[pi];
            if (p * p > b) break;
            const bool is_small = p <= params_.y();
            for (u64 m = ((a + p - 1) / p) * p; m <= b; m += p) {
                const std::size_t i = m - a;
                unsigned v = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++v;
                }
                if (is_small) {
                    if (v > params_.r()) blk.over_cap[i] = 1;
                    blk.h[i] += small_[small_index(p, small)][std::min(v, params_.r())];
                } else {
                    blk.tail[i] += ell_double(p, v);
                }
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            const u64 q = rem[i];
            if (q == 1) continue;
            // leftover prime with exponent 1
            if (q <= params_.y()) blk.h[i] += small_[small_index(q, small)][1];
            else blk.tail[i] += std::log1p(1.0 / static_cast<double>(q));
        }
        return blk;
    }

private:
    static std::size_t small_index(u64 p, const std::vector<u64>& small) {
        return static_cast<std::size_t>(std::lower_bound(small.begin(), small.end(), p) - small.begin());
    }

    const TruncationParams& params_;
    std::vector<std::vector<double>> small_;
};

struct BlockCounts {
    u64 e0 = 0, e1 = 0, e2 = 0, s = 0, all = 0;
};

inline ErrorSetCounts count_error_sets(u64 x, const TruncationParams& params, u64 k, const ErrorSetConfig& cfg) {
    const TruncTables tables(params);
    const auto sieve_primes = primes_up_to(isqrt(x + 1) + 1);
    const double target = std::log(static_cast<double>(k));
    const double half_width = 3.0 * params.eps() + cfg.s_guard;
    const u64 block = std::max<u64>(cfg.block, 1);
    const std::size_t blocks = (x + block - 1) / block;
    std::vector<BlockCounts> partial(blocks);
    parallel_blocks(blocks, cfg.threads, [&](std::size_t bi) {
        const u64 a = 1 + bi * block;
        const u64 b = std::min(x, a + block - 1);
        const auto blk = tables.compute(a, b + 1, sieve_primes);
        BlockCounts c;
        for (u64 n = a; n <= b; ++n) {
            const std::size_t i = n - a;
            const bool in0 = std::log1p(1.0 / static_cast<double>(n)) > params.eps();
            const bool in1 = blk.tail[i] > params.eps() || blk.tail[i + 1] > params.eps();
            const bool in2 = blk.over_cap[i] || blk.over_cap[i + 1];
            const bool ins = std::abs(blk.h[i + 1] - blk.h[i] - target) <= half_width;
            c.e0 += in0;
            c.e1 += in1;
            c.e2 += in2;
            c.s += ins;
            c.all += (in0 || in1 || in2 || ins);
        }
        partial[bi] = c;
    });
    ErrorSetCounts out;
    for (const auto& c : partial) {
        out.e0 += c.e0;
        out.e1 += c.e1;
        out.e2 += c.e2;
        out.s += c.s;
        out.union_all += c.all;
    }
    return out;
}

}  // namespace detail

/// sum_{p <= y} 2 floor((x+1) / p^(r+1)), a union bound on #E2.
inline double e2_union_bound(u64 x, const TruncationParams& params) {
    double total = 0.0;
    for (u64 p : params.small_primes()) {
        const BigInt pk = pow_big(p, params.r() + 1);
        const BigInt q = BigInt(x + 1) / pk;
        total += 2.0 * to_double(q);
    }
    return total;
}

/// Exact sizes of E0, E1, E2 and S over [1, x] with their bound shapes.
inline ErrorSetReport error_sets(u64 x, const TruncationParams& params, u64 k, const ErrorSetConfig& cfg = {}) {
    if (x < 2) throw PreconditionError("error_sets requires x >= 2");
    if (k < 2) throw PreconditionError("error_sets requires k >= 2");
    if (x > cfg.max_x)
        throw BudgetError("error_sets x=" + std::to_string(x) + " exceeds budget " + std::to_string(cfg.max_x));
    ErrorSetReport rep;
    rep.x = x;
    rep.k = k;
    rep.y = params.y();
    rep.r = params.r();
    rep.eps = params.eps();
    rep.counts = detail::count_error_sets(x, params, k, cfg);
    const double xd = static_cast<double>(x);
    const double yd = static_cast<double>(params.y());
    rep.bounds.e0_bound = 1.0 / params.eps();
    rep.bounds.e1_bound_shape = xd / (params.eps() * yd * std::log(yd));
    rep.bounds.e2_bound_shape = xd * std::pow(2.0, -static_cast<double>(params.r()));
    rep.bounds.e2_union_bound = e2_union_bound(x, params);
    if (params.period() <= cfg.period_budget) {
        const u64 m = static_cast<u64>(params.period());
        // S restricted to one full period, n = 1..M
        ErrorSetConfig period_cfg = cfg;
        period_cfg.max_x = m;
        const auto per = m >= 1 ? detail::count_error_sets(m, params, k, period_cfg).s : 0;
        rep.bounds.s_model = xd * static_cast<double>(per) / static_cast<double>(m) + static_cast<double>(m);
    }
    return rep;
}

/// Which of the four sets one n belongs to, decided per n from exact values.
struct Membership {
    u64 n = 0;
    bool e0 = false;
    bool e1 = false;
    bool e2 = false;
    bool s = false;
    bool covered() const { return e0 || e1 || e2 || s; }
};

inline Membership classify_point(u64 n, const TruncationParams& params, u64 k, double s_guard = 1e-9) {
    Membership m{n};
    m.e0 = std::log1p(1.0 / static_cast<double>(n)) > params.eps();
    m.e1 = g_tail(n, params.y()).value() > params.eps() || g_tail(n + 1, params.y()).value() > params.eps();
    for (u64 p : params.small_primes())
        if (valuation(n, p) > params.r() || valuation(n + 1, p) > params.r()) m.e2 = true;
    m.s = std::abs(D(n, params).value() - std::log(static_cast<double>(k))) <= 3.0 * params.eps() + s_guard;
    return m;
}

struct InclusionReport {
    u64 solutions = 0;
    u64 covered = 0;
    std::vector<Membership> members;
    std::vector<u64> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks that every solution n <= x lies in E0 u E1 u E2 u S.
inline InclusionReport verify_inclusion(u64 x, const TruncationParams& params, u64 k,
                                        const ErrorSetConfig& cfg = {}) {
    if (x < 2) throw PreconditionError("verify_inclusion requires x >= 2");
    if (k < 2) throw PreconditionError("verify_inclusion requires k >= 2");
    if (x > cfg.max_x)
        throw BudgetError("verify_inclusion x=" + std::to_string(x) + " exceeds budget " +
                          std::to_string(cfg.max_x));
    SearchConfig scfg;
    scfg.threads = cfg.threads;
    InclusionReport rep;
    for (const auto& sol : search(k, x, scfg)) {
        const auto m = classify_point(sol.n, params, k, cfg.s_guard);
        ++rep.solutions;
        if (m.covered()) ++rep.covered;
        else rep.violations.push_back(sol.n);
        rep.members.push_back(m);
    }
    return rep;
}

}  // namespace sigmak
