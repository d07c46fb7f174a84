#pragma once

#include "sigmak/arith.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmak {

/// One n with sigma(n+1) = k * sigma(n).
struct SolutionRecord {
    u64 n = 0;
    u64 k = 0;
    u64 sigma_n = 0;
    u64 sigma_n1 = 0;
    friend bool operator==(const SolutionRecord&, const SolutionRecord&) = default;
};

struct SearchConfig {
    Threads threads = Threads::serial();
    u64 window = u64{1} << 20;
    u64 limit_ceiling = 10'000'000'000ull;
};

/// Recomputes both sigma values by factorisation.
inline bool verify_record(const SolutionRecord& r) {
    const auto s0 = sigma_u64(factorize(r.n));
    const auto s1 = sigma_u64(factorize(r.n + 1));
    if (!s0 || !s1) return false;
    return *s0 == r.sigma_n && *s1 == r.sigma_n1 &&
           static_cast<u128>(r.k) * r.sigma_n == static_cast<u128>(r.sigma_n1);
}

/// Every n <= limit with sigma(n+1) = k sigma(n), ascending. Windows overlap
/// by one entry (the n+1 of a window's last n); each hit is re-verified by
/// factorisation and a failed re-check throws.
inline std::vector<SolutionRecord> search(u64 k, u64 limit, const SearchConfig& cfg = {}) {
    if (k < 1) throw PreconditionError("search requires k >= 1");
    if (limit < 1) throw PreconditionError("search requires limit >= 1");
    if (limit > cfg.limit_ceiling)
        throw BudgetError("search limit " + std::to_string(limit) + " exceeds ceiling " +
                          std::to_string(cfg.limit_ceiling));
    const u64 window = std::max<u64>(cfg.window, 1);
    const std::size_t blocks = (limit + window - 1) / window;
    std::vector<std::vector<SolutionRecord>> found(blocks);
    parallel_blocks(blocks, cfg.threads, [&](std::size_t i) {
        const u64 a = 1 + i * window;
        const u64 b = std::min(limit, a + window - 1);
        std::vector<u64> sig(b - a + 2);
        detail::sigma_segment(a, b + 1, sig.data());
        for (u64 n = a; n <= b; ++n) {
            const u64 s0 = sig[n - a];
            const u64 s1 = sig[n - a + 1];
            if (static_cast<u128>(s0) * k == s1) found[i].push_back({n, k, s0, s1});
        }
    });
    std::vector<SolutionRecord> out;
    for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
    for (const auto& r : out)
        if (!verify_record(r))
            throw std::logic_error("sieve hit n=" + std::to_string(r.n) + " failed factorisation re-check");
    return out;
}

/// Solution lists published for k = 2 and k = 3, exhaustive up to their
/// largest element. Empty for other k.
inline std::vector<u64> published_solutions(u64 k) {
    if (k == 2) return {5, 125, 1253, 1673, 3127, 5191, 7615, 12035};
    if (k == 3) return {1, 1919, 2759, 11219};
    return {};
}

struct ListComparison {
    std::vector<u64> missing;  // published but not found
    std::vector<u64> extra;    // found at or below the largest published value but unpublished
    bool exact() const { return missing.empty() && extra.empty(); }
};

inline ListComparison compare_with_published(u64 k, std::span<const SolutionRecord> found) {
    ListComparison cmp;
    const auto pub = published_solutions(k);
    if (pub.empty()) return cmp;
    const u64 top = pub.back();
    std::vector<u64> ns;
    for (const auto& r : found)
        if (r.n <= top) ns.push_back(r.n);
    std::set_difference(pub.begin(), pub.end(), ns.begin(), ns.end(), std::back_inserter(cmp.missing));
    std::set_difference(ns.begin(), ns.end(), pub.begin(), pub.end(), std::back_inserter(cmp.extra));
    return cmp;
}

struct DensityPoint {
    u64 x = 0;
    u64 count = 0;
    double ratio = 0.0;
    /// 1 / sqrt(log log log x); nullopt while log log log x <= 0
    std::optional<double> bound;
};

inline std::optional<double> density_bound_shape(u64 x) {
    const double lx = std::log(static_cast<double>(x));
    if (lx <= 1.0) return std::nullopt;
    const double lll = std::log(std::log(lx));
    if (!(lll > 0.0)) return std::nullopt;
    return 1.0 / std::sqrt(lll);
}

/// A_k(x) at each requested x, from one search up to the largest.
inline std::vector<DensityPoint> count_series(u64 k, std::span<const u64> xs, const SearchConfig& cfg = {}) {
    if (k < 2) throw PreconditionError("density requires k >= 2");
    if (xs.empty()) return {};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < 1) throw PreconditionError("density points must be positive");
        if (i > 0 && xs[i] < xs[i - 1]) throw PreconditionError("density points must be ascending");
    }
    const auto sols = search(k, xs.back(), cfg);
    std::vector<DensityPoint> out;
    std::size_t idx = 0;
    for (u64 x : xs) {
        while (idx < sols.size() && sols[idx].n <= x) ++idx;
        out.push_back({x, idx, static_cast<double>(idx) / static_cast<double>(x), density_bound_shape(x)});
    }
    return out;
}

/// Parameter schedule r = floor(log log log x), y = log x / (3 log log x),
/// eps = 1/(13 y), clamped to r >= 1, y >= 5 at desk scale.
struct ScheduleParams {
    u64 x = 0;  // 0 when built from log x alone
    double log_x = 0.0;
    long r = 1;
    double y = 5.0;
    double eps = 1.0 / 65.0;
    bool clamped = false;
    long raw_r = 0;
    double raw_y = 0.0;
};

/// Schedule from log x, for x beyond integer range. log log log x within
/// 1e-12 (relative) of an integer snaps to it before flooring, absorbing the
/// rounding of the nested logarithms.
inline ScheduleParams schedule_from_log(double log_x) {
    if (!(log_x > 1.0)) throw PreconditionError("schedule requires x >= 3");
    const double ll = std::log(log_x);
    const double lll = std::log(ll);
    const double nearest = std::round(lll);
    const double snapped = std::abs(lll - nearest) <= 1e-12 * std::max(1.0, std::abs(lll)) ? nearest : lll;
    ScheduleParams s;
    s.log_x = log_x;
    s.raw_r = static_cast<long>(std::floor(snapped));
    s.raw_y = log_x / (3.0 * ll);
    s.r = std::max(s.raw_r, 1L);
    s.y = std::max(s.raw_y, 5.0);
    s.clamped = s.raw_r < 1 || s.raw_y < 5.0;
    s.eps = 1.0 / (13.0 * s.y);
    return s;
}

inline ScheduleParams schedule(u64 x) {
    if (x < 3) throw PreconditionError("schedule requires x >= 3");
    auto s = schedule_from_log(std::log(static_cast<double>(x)));
    s.x = x;
    return s;
}

}  // namespace sigmak
