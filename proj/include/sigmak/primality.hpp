#pragma once

#include "sigmak/bigint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace sigmak {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

namespace detail {

inline bool strong_probable_prime(u64 n, u64 a, u64 d, int s) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

/// Deterministic primality for every 64-bit integer. The first twelve prime
/// bases are a known sufficient witness set below 3.3 * 10^24.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr std::array<u64, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : bases) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;
    const int s = std::countr_zero(n - 1);
    const u64 d = (n - 1) >> s;
    for (u64 a : bases) {
        if (!detail::strong_probable_prime(n, a, d, s)) return false;
    }
    return true;
}

struct PrimalityResult {
    bool prime = false;
    /// true when the verdict rests on probable-prime tests rather than a proof
    bool probable = false;
};

/// Primality of an arbitrary-size integer. Below 2^64 the answer is exact.
/// Above, the same twelve bases are deterministic up to 3.3 * 10^24; beyond
/// that 25 random-base Miller-Rabin rounds are added and the result is
/// flagged probable (composite acceptance chance below 4^-25 per input).
inline PrimalityResult primality(const BigInt& n) {
    if (n < 2) return {false, false};
    if (n <= std::numeric_limits<u64>::max()) return {is_prime(static_cast<u64>(n)), false};
    static constexpr std::array<unsigned, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (unsigned p : bases) {
        if (n % p == 0) return {false, false};
    }
    const BigInt nm1 = n - 1;
    const unsigned s = boost::multiprecision::lsb(nm1);
    const BigInt d = nm1 >> s;
    auto spsp = [&](const BigInt& a) {
        BigInt x = boost::multiprecision::powm(a, d, n);
        if (x == 1 || x == nm1) return true;
        for (unsigned i = 1; i < s; ++i) {
            x = (x * x) % n;
            if (x == nm1) return true;
        }
        return false;
    };
    for (unsigned a : bases) {
        if (!spsp(BigInt(a))) return {false, false};
    }
    static const BigInt deterministic_limit("3317044064679887385961981");
    if (n < deterministic_limit) return {true, false};
    // fixed-seed bases keep the verdict reproducible
    u64 state = 0x9E3779B97F4A7C15ull;
    for (int i = 0; i < 25; ++i) {
        state += 0x9E3779B97F4A7C15ull;
        u64 z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        const BigInt a = 2 + BigInt(z) % (n - 3);
        if (!spsp(a)) return {false, false};
    }
    return {true, true};
}

inline bool is_prime(const BigInt& n) { return primality(n).prime; }

/// All primes <= limit by the sieve of Eratosthenes (odd-only bitmap).
inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> out;
    if (limit < 2) return out;
    out.push_back(2);
    const u64 half = (limit - 1) / 2;  // index i <-> 2i + 1, i in [1, half]
    std::vector<bool> composite(half + 1, false);
    for (u64 i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const u64 p = 2 * i + 1;
        out.push_back(p);
        for (u64 j = (p * p) / 2; j <= half; j += p) composite[j] = true;
    }
    return out;
}

}  // namespace sigmak
