#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace sigmak {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Thrown when a request exceeds a configured work or memory budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::string to_string(const BigInt& v) { return v.str(); }

/// Nearest double to a / b for positive big integers, without overflow in the
/// intermediate conversion. Exponents outside double range saturate.
inline double ratio_to_double(const BigInt& a, const BigInt& b) {
    if (a == 0) return 0.0;
    const long abits = static_cast<long>(boost::multiprecision::msb(a));
    const long bbits = static_cast<long>(boost::multiprecision::msb(b));
    // quotient carries 64..65 significant bits; the remainder only matters as a sticky bit
    const long shift = 64 - (abits - bbits);
    BigInt num = a;
    BigInt den = b;
    if (shift > 0) num <<= shift;
    else if (shift < 0) den <<= -shift;
    BigInt q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    if (r != 0) q |= 1;  // sticky
    // q < 2^66, so reduce to 64 bits with sticky bit retained before converting
    int extra = 0;
    while (boost::multiprecision::msb(q) >= 64) {
        const bool low = bit_test(q, 0);
        q >>= 1;
        if (low) q |= 1;
        ++extra;
    }
    const auto q64 = static_cast<std::uint64_t>(q);
    return std::ldexp(static_cast<double>(q64), extra - static_cast<int>(shift));
}

inline double to_double(const BigInt& v) { return ratio_to_double(v, BigInt(1)); }

inline double to_double(const BigRational& v) {
    const BigInt& n = boost::multiprecision::numerator(v);
    const BigInt& d = boost::multiprecision::denominator(v);
    if (n < 0) return -ratio_to_double(-n, d);
    return ratio_to_double(n, d);
}

/// Base-e logarithm of a positive big integer.
inline double log_big(const BigInt& v) {
    const long bits = static_cast<long>(boost::multiprecision::msb(v));
    if (bits < 53) return std::log(static_cast<double>(static_cast<std::uint64_t>(v)));
    const long shift = bits - 62;
    const BigInt top = v >> shift;
    const double mant = static_cast<double>(static_cast<std::uint64_t>(top));
    return std::log(mant) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace sigmak
