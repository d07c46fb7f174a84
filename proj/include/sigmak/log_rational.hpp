#pragma once

#include "sigmak/bigint.hpp"

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace sigmak {

/// A real number of the form log(num/den) with num, den positive and coprime.
///
/// Equality and ordering are decided on the exact rational num/den (log is
/// monotone, so the order agrees with the order of the logarithms). Addition
/// of logarithms is multiplication of keys.
class LogRational {
public:
    LogRational() : key_(1) {}
    explicit LogRational(BigRational key) : key_(std::move(key)) {
        if (key_ <= 0) throw PreconditionError("LogRational key must be positive");
    }
    LogRational(const BigInt& num, const BigInt& den) : LogRational(BigRational(num, den)) {}

    static LogRational zero() { return LogRational(); }

    const BigRational& key() const { return key_; }
    BigInt num() const { return boost::multiprecision::numerator(key_); }
    BigInt den() const { return boost::multiprecision::denominator(key_); }

    bool is_zero() const { return key_ == 1; }

    /// log(num) - log(den) as a double. Keys near 1 go through log1p of the
    /// exactly formed difference, so small logarithms keep full relative
    /// precision; the result is within a couple of ulps of the true value.
    double value() const {
        const BigInt n = num();
        const BigInt d = den();
        if (n == d) return 0.0;
        // key in (1/2, 2): log1p((n - d) / d)
        if (n < 2 * d && d < 2 * n) {
            if (n > d) return std::log1p(ratio_to_double(n - d, d));
            return std::log1p(-ratio_to_double(d - n, d));
        }
        const double q = ratio_to_double(n, d);
        if (std::isfinite(q) && q > 0.0 && q >= 1e-300) return std::log(q);
        return log_big(n) - log_big(d);
    }

    LogRational operator+(const LogRational& o) const { return LogRational(key_ * o.key_); }
    LogRational operator-(const LogRational& o) const { return LogRational(key_ / o.key_); }
    LogRational operator-() const { return LogRational(1 / key_); }
    LogRational& operator+=(const LogRational& o) {
        key_ *= o.key_;
        return *this;
    }
    LogRational& operator-=(const LogRational& o) {
        key_ /= o.key_;
        return *this;
    }

    friend bool operator==(const LogRational& a, const LogRational& b) { return a.key_ == b.key_; }
    friend std::strong_ordering operator<=>(const LogRational& a, const LogRational& b) {
        if (a.key_ < b.key_) return std::strong_ordering::less;
        if (b.key_ < a.key_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const { return "log(" + num().str() + "/" + den().str() + ")"; }

    friend std::ostream& operator<<(std::ostream& os, const LogRational& v) { return os << v.str(); }

private:
    BigRational key_;
};

}  // namespace sigmak
