#pragma once

#include "sigmak/arith.hpp"

#include <array>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

namespace sigmak {

/// a x + b with a > 0.
struct LinearForm {
    BigInt a = 1;
    BigInt b = 0;

    LinearForm(BigInt a_, BigInt b_) : a(std::move(a_)), b(std::move(b_)) {
        if (a <= 0) throw PreconditionError("linear form needs a positive leading coefficient");
    }

    BigInt operator()(const BigInt& x) const { return a * x + b; }
};

/// Integer polynomial, coefficients in ascending degree.
using Poly = std::vector<BigInt>;

inline Poly poly_mul(const Poly& p, const Poly& q) {
    if (p.empty() || q.empty()) return {};
    Poly out(p.size() + q.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

inline Poly poly_scale(Poly p, const BigInt& c) {
    for (auto& v : p) v *= c;
    return p;
}

inline Poly poly_of(const LinearForm& f) { return {f.b, f.a}; }

/// The four forms of the k = 2 family: n = (252x+223)(6x+5) and
/// n + 1 = 6 (7x+6)(36x+31).
inline std::array<LinearForm, 4> family_forms() {
    return {LinearForm{252, 223}, LinearForm{6, 5}, LinearForm{7, 6}, LinearForm{36, 31}};
}

struct IdentityReport {
    Poly left;   // (252x+223)(6x+5)
    Poly right;  // 6 (7x+6)(36x+31)
    /// 2 (252x+224)(6x+6) - 12 (7x+7)(36x+32), identically zero
    Poly sigma_gap;
    bool ok = false;
};

/// Expands both sides of the family symbolically: left = 1512x^2+2598x+1115,
/// right = left + 1, and sigma(n+1) = 2 sigma(n) reduces to sigma_gap == 0.
inline IdentityReport identity_check() {
    const auto f = family_forms();
    IdentityReport rep;
    rep.left = poly_mul(poly_of(f[0]), poly_of(f[1]));
    rep.right = poly_scale(poly_mul(poly_of(f[2]), poly_of(f[3])), 6);
    const Poly lhs = poly_scale(poly_mul({224, 252}, {6, 6}), 2);
    const Poly rhs = poly_scale(poly_mul({7, 7}, {32, 36}), 12);
    rep.sigma_gap.resize(3);
    for (std::size_t i = 0; i < 3; ++i) rep.sigma_gap[i] = lhs[i] - rhs[i];
    const Poly expected_left{1115, 2598, 1512};
    const Poly expected_right{1116, 2598, 1512};
    rep.ok = rep.left == expected_left && rep.right == expected_right &&
             std::all_of(rep.sigma_gap.begin(), rep.sigma_gap.end(), [](const BigInt& c) { return c == 0; });
    return rep;
}

struct FamilyHit {
    u64 x = 0;
    std::array<u64, 4> primes{};  // 252x+223, 6x+5, 7x+6, 36x+31
    BigInt n = 0;
    BigInt sigma_n = 0;
    BigInt sigma_n1 = 0;
    /// sigma(n+1) = 2 sigma(n) from the prime structure, and from direct
    /// factorisation whenever n+1 fits in 64 bits
    bool verified = false;
    bool direct_checked = false;
};

/// Re-derives sigma(n) = (p+1)(q+1) and sigma(n+1) = 12 (q1+1)(q2+1), and
/// cross-checks by factorising n and n+1 when they fit in 64 bits.
inline FamilyHit make_hit(u64 x) {
    const auto f = family_forms();
    FamilyHit h;
    h.x = x;
    for (std::size_t i = 0; i < 4; ++i) h.primes[i] = static_cast<u64>(f[i](BigInt(x)));
    const auto [p1, p2, q1, q2] = h.primes;
    h.n = BigInt(p1) * p2;
    const BigInt n1 = BigInt(6) * q1 * q2;
    const bool distinct = p1 != p2 && q1 != q2 && q1 > 3 && q2 > 3;
    const bool all_prime = is_prime(p1) && is_prime(p2) && is_prime(q1) && is_prime(q2);
    h.sigma_n = BigInt(p1 + 1) * (p2 + 1);
    h.sigma_n1 = BigInt(12) * (q1 + 1) * (q2 + 1);
    bool ok = distinct && all_prime && n1 == h.n + 1 && h.sigma_n1 == 2 * h.sigma_n;
    if (n1 <= std::numeric_limits<u64>::max()) {
        h.direct_checked = true;
        const BigInt s0 = sigma(factorize(static_cast<u64>(h.n)));
        const BigInt s1 = sigma(factorize(static_cast<u64>(n1)));
        ok = ok && s0 == h.sigma_n && s1 == h.sigma_n1;
    }
    h.verified = ok;
    return h;
}

/// Every x <= x_limit where all four forms are prime, ascending.
inline std::vector<FamilyHit> family_search(u64 x_limit, Threads threads = Threads::serial()) {
    // keeps 252x+223 and 6(7x+6)(36x+31)'s factors well inside 64 bits
    if (x_limit > 1'000'000'000'000'000ull) throw PreconditionError("family_search x_limit above 10^15");
    constexpr u64 block = 1 << 14;
    const std::size_t blocks = static_cast<std::size_t>(x_limit / block + 1);
    std::vector<std::vector<FamilyHit>> partial(blocks);
    parallel_blocks(blocks, threads, [&](std::size_t b) {
        const u64 lo = b * block;
        const u64 hi = std::min(x_limit, lo + block - 1);
        for (u64 x = lo; x <= hi; ++x) {
            if (!is_prime(7 * x + 6) || !is_prime(6 * x + 5) || !is_prime(36 * x + 31) || !is_prime(252 * x + 223))
                continue;
            partial[b].push_back(make_hit(x));
        }
    });
    std::vector<FamilyHit> out;
    for (auto& p : partial) out.insert(out.end(), p.begin(), p.end());
    return out;
}

struct FixedDivisorReport {
    std::vector<u64> candidate_primes;
    std::vector<u64> fixed_divisors;
    BigInt p1 = 0;  // P(1)
    BigInt p2 = 0;  // P(2)
    BigInt gcd_P1_P2 = 0;
};

inline BigInt eval_product(std::span<const LinearForm> forms, const BigInt& x) {
    BigInt v = 1;
    for (const auto& f : forms) v *= f(x);
    return v;
}

/// A prime p > deg P not dividing the leading coefficient cannot divide P(x)
/// for every x, so the candidates are primes up to max(#forms, largest prime
/// factor of the leading coefficient). Each is tested on x = 0 .. p-1.
inline FixedDivisorReport fixed_divisor_check(std::span<const LinearForm> forms) {
    if (forms.empty()) throw PreconditionError("fixed_divisor_check requires at least one form");
    FixedDivisorReport rep;
    u64 bound = forms.size();
    for (const auto& f : forms) {
        // prime factors of each leading coefficient cover those of the product
        if (f.a > std::numeric_limits<u64>::max()) throw PreconditionError("leading coefficient exceeds 64 bits");
        const auto fa = factorize(static_cast<u64>(f.a));
        if (!fa.factors().empty()) bound = std::max(bound, fa.factors().back().p);
    }
    rep.candidate_primes = primes_up_to(bound);
    for (u64 p : rep.candidate_primes) {
        bool always = true;
        for (u64 x = 0; x < p && always; ++x) {
            if (eval_product(forms, BigInt(x)) % p != 0) always = false;
        }
        if (always) rep.fixed_divisors.push_back(p);
    }
    rep.p1 = eval_product(forms, 1);
    rep.p2 = eval_product(forms, 2);
    rep.gcd_P1_P2 = boost::multiprecision::gcd(rep.p1, rep.p2);
    return rep;
}

/// CSV header for hit export.
inline constexpr const char* family_csv_header = "x,p1,p2,q1,q2,n,sigma_n,sigma_n1";

inline void write_hit_csv(std::ostream& os, const FamilyHit& h) {
    os << h.x << ',' << h.primes[0] << ',' << h.primes[1] << ',' << h.primes[2] << ',' << h.primes[3] << ','
       << h.n.str() << ',' << h.sigma_n.str() << ',' << h.sigma_n1.str() << '\n';
}

}  // namespace sigmak
