#pragma once

#include "sigmak/arith.hpp"
#include "sigmak/solutions.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace sigmak {

/// Divisors of n split into k disjoint parts of equal sum sigma(n)/k.
struct PartitionCertificate {
    u64 n = 0;
    u64 k = 0;
    std::vector<std::vector<u64>> parts;
};

enum class SearchStatus { decided, timeout };

/// Work allowance for one classifier call, in bitset-word updates plus
/// search nodes.
struct Budget {
    u64 remaining = 10'000'000;

    bool spend(u64 units) {
        if (units > remaining) {
            remaining = 0;
            return false;
        }
        remaining -= units;
        return true;
    }
};

namespace detail {

/// Subset-sum engine over items sorted descending. reach[i] holds the sums
/// up to `need` attainable from items[i..]; with it the enumeration never
/// enters a dead branch.
class SubsetSums {
public:
    SubsetSums(std::span<const u64> items, u64 need) : items_(items.begin(), items.end()), need_(need) {
        words_ = static_cast<std::size_t>(need / 64 + 1);
    }

    /// Cost of building the reachability table, in word updates.
    u64 cost() const { return static_cast<u64>(items_.size() + 1) * words_; }

    void build() {
        const std::size_t m = items_.size();
        reach_.assign((m + 1) * words_, 0);
        set(m, 0);
        for (std::size_t i = m; i-- > 0;) {
            u64* dst = row(i);
            const u64* src = row(i + 1);
            std::copy(src, src + words_, dst);
            const u64 w = items_[i];
            if (w > need_) continue;
            const std::size_t ws = static_cast<std::size_t>(w / 64);
            const unsigned bs = static_cast<unsigned>(w % 64);
            for (std::size_t j = words_; j-- > ws;) {
                u64 v = src[j - ws] << bs;
                if (bs && j - ws > 0) v |= src[j - ws - 1] >> (64 - bs);
                dst[j] |= v;
            }
            // clear bits beyond need
            const unsigned top = static_cast<unsigned>(need_ % 64);
            if (top != 63) dst[words_ - 1] &= (u64{2} << top) - 1;
        }
    }

    bool reachable(std::size_t i, u64 s) const {
        if (s > need_) return false;
        return (row(i)[s / 64] >> (s % 64)) & 1;
    }

    /// Calls visit(chosen indices) for each subset of items[from..] summing to
    /// `need`, in largest-first order; stops when visit returns true.
    bool enumerate(std::size_t from, Budget& budget, bool& out_of_budget,
                   const std::function<bool(const std::vector<std::size_t>&)>& visit) const {
        std::vector<std::size_t> chosen;
        return walk(from, need_, chosen, budget, out_of_budget, visit);
    }

private:
    bool walk(std::size_t i, u64 s, std::vector<std::size_t>& chosen, Budget& budget, bool& oob,
              const std::function<bool(const std::vector<std::size_t>&)>& visit) const {
        if (!budget.spend(1)) {
            oob = true;
            return false;
        }
        if (s == 0) return visit(chosen);
        if (i >= items_.size() || !reachable(i, s)) return false;
        if (items_[i] <= s && reachable(i + 1, s - items_[i])) {
            chosen.push_back(i);
            if (walk(i + 1, s - items_[i], chosen, budget, oob, visit)) return true;
            chosen.pop_back();
            if (oob) return false;
        }
        if (reachable(i + 1, s)) return walk(i + 1, s, chosen, budget, oob, visit);
        return false;
    }

    u64* row(std::size_t i) { return reach_.data() + i * words_; }
    const u64* row(std::size_t i) const { return reach_.data() + i * words_; }
    void set(std::size_t i, u64 s) { row(i)[s / 64] |= u64{1} << (s % 64); }

    std::vector<u64> items_;
    u64 need_;
    std::size_t words_;
    std::vector<u64> reach_;
};

/// First-fit decreasing: each group takes every remaining item that still
/// fits. Finds most divisor partitions in linear time; failure decides nothing.
/// Items must sum to parts * target.
inline std::optional<std::vector<std::vector<u64>>> greedy_partition(const std::vector<u64>& items, u64 parts,
                                                                      u64 target) {
    std::vector<char> used(items.size(), 0);
    std::vector<std::vector<u64>> out;
    for (u64 p = 0; p + 1 < parts; ++p) {
        u64 left = target;
        std::vector<u64> part;
        for (std::size_t i = 0; i < items.size() && left; ++i) {
            if (used[i] || items[i] > left) continue;
            used[i] = 1;
            part.push_back(items[i]);
            left -= items[i];
        }
        if (left) return std::nullopt;
        out.push_back(std::move(part));
    }
    std::vector<u64> last;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (!used[i]) last.push_back(items[i]);
    out.push_back(std::move(last));
    return out;
}

/// Splits `items` (descending) into `parts` groups of sum `target` each,
/// peeling one group at a time around the largest remaining item.
inline std::optional<std::vector<std::vector<u64>>> peel_partition(const std::vector<u64>& items, u64 parts,
                                                                    u64 target, Budget& budget, bool& oob) {
    if (parts == 1) return std::vector<std::vector<u64>>{items};
    if (items.empty() || items.front() > target) return std::nullopt;
    if (!budget.spend(static_cast<u64>(items.size()) * parts)) {
        oob = true;
        return std::nullopt;
    }
    if (auto quick = greedy_partition(items, parts, target)) return quick;
    const u64 need = target - items.front();
    const std::span<const u64> rest(items.begin() + 1, items.end());
    SubsetSums sums(rest, need);
    if (!budget.spend(sums.cost())) {
        oob = true;
        return std::nullopt;
    }
    sums.build();
    std::optional<std::vector<std::vector<u64>>> result;
    sums.enumerate(0, budget, oob, [&](const std::vector<std::size_t>& chosen) {
        std::vector<u64> part{items.front()};
        std::vector<u64> remaining;
        std::size_t c = 0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (c < chosen.size() && chosen[c] == i) {
                part.push_back(rest[i]);
                ++c;
            } else {
                remaining.push_back(rest[i]);
            }
        }
        auto sub = peel_partition(remaining, parts - 1, target, budget, oob);
        if (!sub) return oob;  // stop on budget exhaustion, else try next subset
        sub->insert(sub->begin(), std::move(part));
        result = std::move(sub);
        return true;
    });
    return result;
}

}  // namespace detail

struct LayeredResult {
    SearchStatus status = SearchStatus::decided;
    bool layered = false;
    std::optional<PartitionCertificate> certificate;
    /// nullopt when the search timed out
    std::optional<bool> verdict() const {
        if (status == SearchStatus::timeout) return std::nullopt;
        return layered;
    }
};

/// Whether the divisors of n split into k parts of sum sigma(n)/k. Every
/// n is 1-layered.
inline LayeredResult k_layered_search(u64 n, u64 k, Budget budget = {}) {
    if (n < 1) throw PreconditionError("k_layered requires n >= 1");
    if (k < 1) throw PreconditionError("k_layered requires k >= 1");
    const auto f = factorize(n);
    auto ds = divisors(f);
    std::reverse(ds.begin(), ds.end());
    LayeredResult res;
    if (k == 1) {
        res.layered = true;
        res.certificate = PartitionCertificate{n, 1, {ds}};
        return res;
    }
    const auto s = sigma_u64(f);
    if (!s || *s % k != 0) return res;
    const u64 target = *s / k;
    if (target < n) return res;
    bool oob = false;
    auto parts = detail::peel_partition(ds, k, target, budget, oob);
    if (oob) {
        res.status = SearchStatus::timeout;
        return res;
    }
    if (parts) {
        res.layered = true;
        res.certificate = PartitionCertificate{n, k, std::move(*parts)};
    }
    return res;
}

/// Re-checks a certificate against divisors found by trial division:
/// parts disjoint, covering every divisor, each summing to sigma(n)/k.
inline bool verify_certificate(const PartitionCertificate& c) {
    if (c.n == 0 || c.k == 0 || c.parts.size() != c.k) return false;
    std::vector<u64> divs;
    for (u64 d = 1; d * d <= c.n; ++d) {
        if (c.n % d) continue;
        divs.push_back(d);
        if (d != c.n / d) divs.push_back(c.n / d);
    }
    std::sort(divs.begin(), divs.end());
    const u128 total = std::accumulate(divs.begin(), divs.end(), u128{0});
    if (total % c.k) return false;
    const u128 target = total / c.k;
    std::vector<u64> seen;
    for (const auto& part : c.parts) {
        u128 s = 0;
        for (u64 d : part) {
            s += d;
            seen.push_back(d);
        }
        if (s != target) return false;
    }
    std::sort(seen.begin(), seen.end());
    return seen == divs;
}

/// Stewart-Sierpinski criterion: n = p1^a1 ... pm^am (p1 < ... < pm) is
/// practical iff p1 = 2 (or n = 1) and each p_{i+1} <= 1 + sigma(p1^a1 ... pi^ai).
inline bool is_practical(u64 n) {
    if (n < 1) throw PreconditionError("is_practical requires n >= 1");
    if (n == 1) return true;
    if (n % 2) return false;
    const auto f = factorize(n);
    u128 sig = 1;
    for (const auto& pp : f.factors()) {
        if (pp.p > sig + 1) return false;
        u128 term = 1, pw = 1;
        for (unsigned i = 0; i < pp.a; ++i) {
            pw *= pp.p;
            term += pw;
        }
        sig *= term;
    }
    return true;
}

inline bool is_k_perfect(u64 n, u64 k) {
    if (n < 1) throw PreconditionError("is_k_perfect requires n >= 1");
    const auto s = sigma_u64(factorize(n));
    return s && static_cast<u128>(k) * n == *s;
}

/// n is a sum of distinct proper divisors; nullopt on timeout.
inline std::optional<bool> is_semiperfect(u64 n, Budget budget = {}) {
    if (n < 1) throw PreconditionError("is_semiperfect requires n >= 1");
    auto ds = divisors(factorize(n));
    ds.pop_back();  // n itself
    std::reverse(ds.begin(), ds.end());
    const u128 total = std::accumulate(ds.begin(), ds.end(), u128{0});
    if (total < n) return false;
    detail::SubsetSums sums(ds, n);
    if (!budget.spend(sums.cost())) return std::nullopt;
    sums.build();
    return sums.reachable(0, n);
}

struct ClassifierFlags {
    std::optional<bool> zumkeller;
    std::optional<bool> k_layered;  // for the requested k
    bool practical = false;
    bool abundant = false;
    bool perfect = false;
    bool k_perfect = false;  // for the requested k
    std::optional<bool> semiperfect;
};

struct ClassifierVerdict {
    u64 n = 0;
    u64 k = 2;
    BigInt sigma = 0;
    ClassifierFlags flags;
    std::optional<PartitionCertificate> certificate;
    SearchStatus search_status = SearchStatus::decided;
};

/// All flags for n; the certificate (if any) is for the k-layered split.
inline ClassifierVerdict is_k_layered(u64 n, u64 k, Budget budget = {}) {
    if (k < 2) throw PreconditionError("is_k_layered requires k >= 2");
    ClassifierVerdict v;
    v.n = n;
    v.k = k;
    const auto f = factorize(n);
    v.sigma = sigma(f);
    const BigInt two_n = BigInt(2) * n;
    v.flags.abundant = v.sigma > two_n;
    v.flags.perfect = v.sigma == two_n;
    v.flags.k_perfect = v.sigma == BigInt(k) * n;
    v.flags.practical = is_practical(n);
    auto layered = k_layered_search(n, k, budget);
    v.flags.k_layered = layered.verdict();
    v.certificate = std::move(layered.certificate);
    if (k == 2) v.flags.zumkeller = v.flags.k_layered;
    else v.flags.zumkeller = k_layered_search(n, 2, budget).verdict();
    v.flags.semiperfect = is_semiperfect(n, budget);
    const bool timed_out = !v.flags.k_layered || !v.flags.zumkeller || !v.flags.semiperfect;
    v.search_status = timed_out ? SearchStatus::timeout : SearchStatus::decided;
    return v;
}

/// For practical n with k | sigma(n) and (k-1)-layered x coprime to n,
/// checks that n x is k-layered. Returns nullopt when a search timed out.
inline std::optional<bool> product_construction_check(u64 n, u64 x, u64 k, Budget budget = {}) {
    if (k < 2) throw PreconditionError("product construction requires k >= 2");
    if (n < 1 || x < 1) throw PreconditionError("product construction requires positive inputs");
    if (std::gcd(n, x) != 1) throw PreconditionError("product construction requires gcd(n, x) = 1");
    if (!is_practical(n)) throw PreconditionError("product construction requires practical n");
    const auto sn = sigma_u64(factorize(n));
    if (!sn || *sn % k != 0) throw PreconditionError("product construction requires k | sigma(n)");
    if (static_cast<u128>(n) * x > std::numeric_limits<u64>::max())
        throw PreconditionError("product n x exceeds 64 bits");
    const auto base = k_layered_search(x, k - 1, budget).verdict();
    if (!base) return std::nullopt;
    if (!*base) throw PreconditionError("product construction requires x to be (k-1)-layered");
    return k_layered_search(n * x, k, budget).verdict();
}

struct AnnotatedSolution {
    SolutionRecord record;
    /// classification of N = n + 1 for the record's k (k >= 2), else for k = 2
    ClassifierVerdict n1;
    bool k_divides_sigma = false;
};

/// Classifies n + 1 for each solution record.
inline std::vector<AnnotatedSolution> annotate_solutions(std::span<const SolutionRecord> records,
                                                         Budget budget = {}) {
    std::vector<AnnotatedSolution> out;
    for (const auto& r : records) {
        AnnotatedSolution a{r, is_k_layered(r.n + 1, std::max<u64>(r.k, 2), budget), false};
        a.k_divides_sigma = r.k != 0 && r.sigma_n1 % r.k == 0;
        out.push_back(std::move(a));
    }
    return out;
}

inline nlohmann::ordered_json certificate_json(const PartitionCertificate& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["k"] = c.k;
    j["parts"] = c.parts;
    return j;
}

inline PartitionCertificate certificate_from_json(const nlohmann::json& j) {
    return PartitionCertificate{j.at("n").get<u64>(), j.at("k").get<u64>(),
                                j.at("parts").get<std::vector<std::vector<u64>>>()};
}

}  // namespace sigmak
