#pragma once

#include "sigmak/arith.hpp"
#include "sigmak/truncation.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sigmak {

struct ExactProvenance {
    friend bool operator==(const ExactProvenance&, const ExactProvenance&) = default;
};

struct EmpiricalProvenance {
    u64 samples = 0;
    u64 seed = 0;
    friend bool operator==(const EmpiricalProvenance&, const EmpiricalProvenance&) = default;
};

using Provenance = std::variant<ExactProvenance, EmpiricalProvenance>;

/// Finite distribution over LogRational values with exact rational
/// probabilities. Atoms are kept ordered by value; zero-mass atoms are never
/// stored.
class Pmf {
public:
    using AtomMap = std::map<LogRational, BigRational>;

    Pmf() = default;
    explicit Pmf(Provenance prov) : provenance_(prov) {}

    static Pmf point(const LogRational& v) {
        Pmf out;
        out.add(v, BigRational(1));
        return out;
    }

    void add(const LogRational& value, const BigRational& prob) {
        if (prob < 0) throw PreconditionError("negative probability");
        if (prob == 0) return;
        atoms_[value] += prob;
    }

    const AtomMap& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const Provenance& provenance() const { return provenance_; }
    bool is_exact() const { return std::holds_alternative<ExactProvenance>(provenance_); }

    BigRational mass() const {
        BigRational m = 0;
        for (const auto& [v, p] : atoms_) m += p;
        return m;
    }

    BigRational probability_of(const LogRational& v) const {
        auto it = atoms_.find(v);
        return it == atoms_.end() ? BigRational(0) : it->second;
    }

    double mean() const {
        CompensatedSum s;
        for (const auto& [v, p] : atoms_) s.add(v.value() * to_double(p));
        return s.value();
    }

    /// P(lo <= X <= hi), closed, with `slack` widening both ends.
    BigRational interval_probability(double lo, double hi, double slack = 1e-12) const {
        BigRational m = 0;
        for (const auto& [v, p] : atoms_) {
            const double x = v.value();
            if (x >= lo - slack && x <= hi + slack) m += p;
        }
        return m;
    }

    /// Same atoms with the same probabilities; provenance is ignored.
    friend bool operator==(const Pmf& a, const Pmf& b) { return a.atoms_ == b.atoms_; }

private:
    AtomMap atoms_;
    Provenance provenance_ = ExactProvenance{};
};

/// Distribution of X + Y for independent X, Y, merging on exact value keys.
inline Pmf convolve(const Pmf& a, const Pmf& b) {
    Pmf out;
    for (const auto& [va, pa] : a.atoms())
        for (const auto& [vb, pb] : b.atoms()) out.add(va + vb, pa * pb);
    return out;
}

/// Z_{p,r} for N uniform on Z/p^r Z: 0 with probability 1 - 2/p,
/// +-ell(p^a) with (p-1)/p^(a+1) for 1 <= a < r, +-ell(p^r) with 1/p^r.
inline Pmf z_pmf(u64 p, unsigned r) {
    if (p < 2 || !is_prime(p)) throw PreconditionError("z_pmf requires a prime p");
    if (r < 1) throw PreconditionError("z_pmf requires r >= 1");
    Pmf out;
    const BigInt pb(p);
    out.add(LogRational::zero(), BigRational(pb - 2, pb));
    for (unsigned a = 1; a <= r; ++a) {
        const BigRational prob = a < r ? BigRational(pb - 1, pow_big(p, a + 1)) : BigRational(BigInt(1), pow_big(p, r));
        const LogRational v = ell(p, a);
        out.add(v, prob);
        out.add(-v, prob);
    }
    return out;
}

/// ell(p^min(Z, r)) for the geometric valuation law P(Z = a) = (1 - 1/p) p^-a,
/// with the tail a >= r lumped at r. This is the distribution of one
/// summand h-value; differences of two consecutive ones give z_pmf.
inline Pmf kubilius_capped_pmf(u64 p, unsigned r) {
    if (p < 2 || !is_prime(p)) throw PreconditionError("kubilius_capped_pmf requires a prime p");
    Pmf out;
    const BigInt pb(p);
    for (unsigned a = 0; a < r; ++a) out.add(ell(p, a), BigRational(pb - 1, pow_big(p, a + 1)));
    out.add(ell(p, r), BigRational(BigInt(1), pow_big(p, r)));
    return out;
}

struct ModelConfig {
    /// largest product of per-prime atom counts convolved exactly
    u64 exact_budget = 10'000'000;
    /// largest period enumerated by period_model_equivalence
    u64 period_budget = 10'000'000;
    Threads threads = Threads::serial();
};

inline u64 atom_count_product(const std::vector<u64>& primes, unsigned r) {
    u128 prod = 1;
    for (u64 p : primes) {
        prod *= (p == 2 ? 2 * r : 2 * r + 1);
        if (prod > std::numeric_limits<u64>::max()) return std::numeric_limits<u64>::max();
    }
    return static_cast<u64>(prod);
}

/// W_{y,r} = sum of Z_{p,r} over the chosen primes (default: all p <= y),
/// convolved exactly.
inline Pmf w_pmf_exact(const TruncationParams& params, const std::optional<std::vector<u64>>& prime_subset = {},
                       const ModelConfig& cfg = {}) {
    const auto& primes = prime_subset ? *prime_subset : params.small_primes();
    if (atom_count_product(primes, params.r()) > cfg.exact_budget)
        throw BudgetError("exact convolution exceeds atom budget; use Monte Carlo");
    Pmf acc = Pmf::point(LogRational::zero());
    for (u64 p : primes) acc = convolve(acc, z_pmf(p, params.r()));
    return acc;
}

/// sqrt(ln(2/delta) / (2 n)), the DKW uniform CDF deviation at level delta.
inline double dkw_epsilon(u64 samples, double delta = 0.01) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

namespace detail {

inline u64 splitmix64(u64 x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// uniform on [0, n) by rejection; reproducible across standard libraries
inline u64 bounded(std::mt19937_64& rng, u64 n) {
    const u64 threshold = (0 - n) % n;
    for (;;) {
        const u64 x = rng();
        if (x >= threshold) return x % n;
    }
}

/// capped valuation of a residue in Z/p^r Z, zero counting as p^r
inline unsigned capped_valuation(u64 u, u64 p, unsigned r) {
    if (u == 0) return r;
    unsigned a = 0;
    while (a < r && u % p == 0) {
        u /= p;
        ++a;
    }
    return a;
}

}  // namespace detail

/// Substream for one (seed, prime, block) triple.
inline std::mt19937_64 substream(u64 seed, u64 p, u64 block) {
    return std::mt19937_64(detail::splitmix64(detail::splitmix64(seed ^ detail::splitmix64(p)) + block));
}

struct McConfig {
    u64 block = 1 << 16;
    Threads threads = Threads::serial();
};

/// Empirical distribution of W from `samples` draws. For each prime the
/// residue N_p is drawn uniformly on Z/p^r Z from its own substream, so the
/// result depends only on (params, samples, seed, primes).
inline Pmf w_pmf_mc(const TruncationParams& params, u64 samples, u64 seed,
                    const std::optional<std::vector<u64>>& prime_subset = {}, const McConfig& cfg = {}) {
    if (samples < 1) throw PreconditionError("w_pmf_mc requires samples >= 1");
    const auto& primes = prime_subset ? *prime_subset : params.small_primes();
    const unsigned r = params.r();
    std::vector<u64> moduli;
    for (u64 p : primes) {
        const BigInt m = pow_big(p, r);
        if (m > std::numeric_limits<u64>::max() / 2) throw PreconditionError("p^r too large for sampling");
        moduli.push_back(static_cast<u64>(m));
    }
    // per-prime atom code: 0 -> zero, a in [1, r] -> +ell(p^a), r + a -> -ell(p^a)
    const std::size_t np = primes.size();
    const u64 block = std::max<u64>(cfg.block, 1);
    const std::size_t blocks = (samples + block - 1) / block;
    std::vector<std::unordered_map<std::string, u64>> partial(blocks);
    parallel_blocks(blocks, cfg.threads, [&](std::size_t b) {
        const u64 start = b * block;
        const u64 count = std::min(block, samples - start);
        std::vector<std::string> codes(count, std::string(np, '\0'));
        for (std::size_t j = 0; j < np; ++j) {
            auto rng = substream(seed, primes[j], b);
            for (u64 i = 0; i < count; ++i) {
                const u64 u = detail::bounded(rng, moduli[j]);
                const unsigned a0 = detail::capped_valuation(u, primes[j], r);
                const unsigned a1 = detail::capped_valuation((u + 1) % moduli[j], primes[j], r);
                codes[i][j] = static_cast<char>(a1 ? a1 : (a0 ? r + a0 : 0));
            }
        }
        auto& counts = partial[b];
        for (auto& c : codes) ++counts[c];
    });
    std::map<std::string, u64> merged;
    for (const auto& m : partial)
        for (const auto& [code, c] : m) merged[code] += c;
    std::vector<std::vector<LogRational>> value_of(np);
    for (std::size_t j = 0; j < np; ++j) {
        value_of[j].resize(2 * r + 1);
        for (unsigned a = 1; a <= r; ++a) {
            value_of[j][a] = ell(primes[j], a);
            value_of[j][r + a] = -ell(primes[j], a);
        }
    }
    Pmf out(EmpiricalProvenance{samples, seed});
    for (const auto& [code, c] : merged) {
        LogRational v;
        for (std::size_t j = 0; j < np; ++j) v += value_of[j][static_cast<unsigned char>(code[j])];
        out.add(v, BigRational(BigInt(c), BigInt(samples)));
    }
    return out;
}

struct ConcentrationResult {
    double L = 0.0;
    double q = 0.0;
    BigRational q_exact = 0;
    /// left endpoint of a maximising interval [a, a + L]
    double witness_a = 0.0;
};

/// Q_L(X) = sup_a P(X in [a, a + L]) over closed intervals. Some maximiser
/// starts at an atom, so a two-pointer sweep over the sorted atoms is exact;
/// the right end uses 1e-12 absolute slack toward inclusion.
inline ConcentrationResult q_concentration(const Pmf& pmf, double L) {
    if (pmf.empty()) throw PreconditionError("q_concentration requires a nonempty pmf");
    if (!(L > 0.0)) throw PreconditionError("q_concentration requires L > 0");
    std::vector<double> xs;
    std::vector<BigRational> prefix{BigRational(0)};
    for (const auto& [v, p] : pmf.atoms()) {
        xs.push_back(v.value());
        prefix.push_back(prefix.back() + p);
    }
    ConcentrationResult best{L, 0.0, BigRational(0), xs.front()};
    std::size_t j = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (j < i) j = i;
        while (j + 1 < xs.size() && xs[j + 1] <= xs[i] + L + 1e-12) ++j;
        BigRational mass = prefix[j + 1] - prefix[i];
        if (mass > best.q_exact) {
            best.q_exact = std::move(mass);
            best.witness_a = xs[i];
        }
    }
    best.q = to_double(best.q_exact);
    return best;
}

/// Checks Q_L(Z_{p,r}) == 1 - 2/p exactly. Requires p >= 5 prime and
/// L < ell(p); violations throw PreconditionError.
inline bool lemma32_check(u64 p, unsigned r, double L) {
    if (p < 5 || !is_prime(p)) throw PreconditionError("lemma32_check requires a prime p >= 5");
    if (r < 1) throw PreconditionError("lemma32_check requires r >= 1");
    if (!(L > 0.0) || !(L < ell(p, 1).value()))
        throw PreconditionError("lemma32_check requires 0 < L < ell(p)");
    const auto res = q_concentration(z_pmf(p, r), L);
    return res.q_exact == BigRational(BigInt(p - 2), BigInt(p));
}

enum class ModelMode { automatic, exact, monte_carlo };

struct PetrovConfig {
    ModelMode mode = ModelMode::automatic;
    u64 samples = 1'000'000;
    u64 seed = 0;
    ModelConfig model;
    McConfig mc;
};

struct PetrovReport {
    double eps = 0.0;
    double L = 0.0;  // 6 eps
    u64 k = 0;
    std::vector<u64> effective_primes;
    bool exact = true;
    u64 samples = 0;
    /// DKW deviation at delta = 0.01 for Monte Carlo runs, 0 when exact
    double eps_stat = 0.0;
    /// P(|W - log k| <= 3 eps)
    double target_probability = 0.0;
    /// Q_{6 eps}(W)
    double q_measured = 0.0;
    /// (sum over effective primes of 2/p)^(-1/2)
    double rhs_core = 0.0;
    double implied_A = 0.0;
    double mertens_ratio = 0.0;  // sum 2/p over effective primes / (2 log log y)
};

inline double petrov_rhs_core(const std::vector<u64>& primes) {
    CompensatedSum s;
    for (u64 p : primes) s.add(2.0 / static_cast<double>(p));
    return 1.0 / std::sqrt(s.value());
}

/// Measures the anti-concentration quantities of W_{y,r} at scale 6 eps and
/// the constant A they imply against (sum 2/p)^(-1/2).
inline PetrovReport petrov_eval(const TruncationParams& params, u64 k, const PetrovConfig& cfg = {}) {
    if (k < 2) throw PreconditionError("petrov_eval requires k >= 2");
    if (params.effective_primes().empty())
        throw PreconditionError("no effective primes: need y >= 5 and eps <= 1/65");
    PetrovReport rep;
    rep.eps = params.eps();
    rep.L = 6.0 * params.eps();
    rep.k = k;
    rep.effective_primes = params.effective_primes();
    bool exact = cfg.mode == ModelMode::exact ||
                 (cfg.mode == ModelMode::automatic &&
                  atom_count_product(params.small_primes(), params.r()) <= cfg.model.exact_budget);
    const Pmf w = exact ? w_pmf_exact(params, {}, cfg.model) : w_pmf_mc(params, cfg.samples, cfg.seed, {}, cfg.mc);
    rep.exact = exact;
    rep.samples = exact ? 0 : cfg.samples;
    rep.eps_stat = exact ? 0.0 : dkw_epsilon(cfg.samples);
    const double target = std::log(static_cast<double>(k));
    rep.target_probability = to_double(w.interval_probability(target - 3 * params.eps(), target + 3 * params.eps()));
    rep.q_measured = q_concentration(w, rep.L).q;
    rep.rhs_core = petrov_rhs_core(rep.effective_primes);
    rep.implied_A = rep.q_measured / rep.rhs_core;
    const double lly = std::log(std::log(static_cast<double>(params.y())));
    rep.mertens_ratio = lly > 0 ? 1.0 / (rep.rhs_core * rep.rhs_core) / (2.0 * lly) : 0.0;
    return rep;
}

struct PeriodEquivalenceReport {
    BigInt period = 0;
    bool match = false;
    Pmf period_pmf;
    Pmf model_pmf;
};

/// Distribution of D_{y,r}(n) over n = 1..M, counted from the actual
/// valuations of n and n+1.
inline Pmf period_pmf(const TruncationParams& params, const ModelConfig& cfg = {}) {
    if (params.period() > cfg.period_budget)
        throw BudgetError("period " + params.period().str() + " exceeds enumeration budget");
    const u64 m = static_cast<u64>(params.period());
    const auto& primes = params.small_primes();
    const unsigned r = params.r();
    std::map<std::string, u64> counts;
    std::string code(2 * primes.size(), '\0');
    for (u64 n = 1; n <= m; ++n) {
        for (std::size_t j = 0; j < primes.size(); ++j) {
            code[2 * j] = static_cast<char>(std::min(valuation(n, primes[j]), r));
            code[2 * j + 1] = static_cast<char>(std::min(valuation(n + 1, primes[j]), r));
        }
        ++counts[code];
    }
    Pmf out;
    for (const auto& [c, cnt] : counts) {
        LogRational v;
        for (std::size_t j = 0; j < primes.size(); ++j)
            v += ell(primes[j], static_cast<unsigned char>(c[2 * j + 1])) -
                 ell(primes[j], static_cast<unsigned char>(c[2 * j]));
        out.add(v, BigRational(BigInt(cnt), BigInt(m)));
    }
    return out;
}

/// Compares the full-period distribution of D with the exact convolution
/// model of W, atom by atom.
inline PeriodEquivalenceReport period_model_equivalence(const TruncationParams& params, const ModelConfig& cfg = {}) {
    PeriodEquivalenceReport rep;
    rep.period = params.period();
    rep.period_pmf = period_pmf(params, cfg);
    rep.model_pmf = w_pmf_exact(params, {}, cfg);
    rep.match = rep.period_pmf == rep.model_pmf;
    return rep;
}

/// One atom as a JSON object: num, den, log_value, prob_num, prob_den.
inline nlohmann::ordered_json atom_json(const LogRational& v, const BigRational& p) {
    nlohmann::ordered_json j;
    j["num"] = v.num().str();
    j["den"] = v.den().str();
    j["log_value"] = v.value();
    j["prob_num"] = boost::multiprecision::numerator(p).str();
    j["prob_den"] = boost::multiprecision::denominator(p).str();
    return j;
}

/// JSON-lines export, one atom per line in ascending value order.
inline void write_pmf_jsonl(std::ostream& os, const Pmf& pmf) {
    for (const auto& [v, p] : pmf.atoms()) os << atom_json(v, p).dump() << '\n';
}

}  // namespace sigmak
