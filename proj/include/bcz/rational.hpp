#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace bcz {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Invariants (enforced by every constructor and arithmetic operation):
///   - gcd(|num|, den) == 1
///   - den > 0
class Rational {
public:
    Rational() : num_(0), den_(1) {}

    Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_ == 0) throw std::domain_error("zero denominator");
        reduce();
    }

    // NOLINTNEXTLINE(google-explicit-constructor): integers embed exactly
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("zero denominator");
        reduce();
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_positive() const { return num_ > 0; }

    /// True iff the value is an integer (denominator 1 after reduction).
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const BigInt lhs = a.num_ * b.den_;
        const BigInt rhs = b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// Floor of the exact value (toward negative infinity).
    BigInt floor() const {
        BigInt q = num_ / den_;
        if (num_ < 0 && q * den_ != num_) --q;
        return q;
    }

    double to_double() const {
        // num and den can each exceed double range even when the value is
        // modest, so split into integer part plus a 60-bit-scaled remainder
        // instead of converting the raw big integers.
        const bool neg = num_ < 0;
        const BigInt an = neg ? BigInt(-num_) : num_;
        const BigInt q = an / den_;
        const BigInt r = an - q * den_;
        const double frac = static_cast<double>((r << 60) / den_) / 1152921504606846976.0;
        const double mag = static_cast<double>(q) + frac;
        return neg ? -mag : mag;
    }

    std::string to_string() const {
        std::string s = num_.str();
        if (den_ != 1) {
            s += '/';
            s += den_.str();
        }
        return s;
    }

private:
    void reduce() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

/// Reduced rational with positive denominator; errors on den == 0.
inline Rational rational_reduce(BigInt num, BigInt den) {
    return Rational(std::move(num), std::move(den));
}

/// Membership in the golden ratio strip: b/a in [(sqrt(5)-1)/2, (sqrt(5)+1)/2].
///
/// Decided exactly through the sign tests b^2 + ab - a^2 >= 0 and
/// b^2 - ab - a^2 <= 0, which are equivalent to the two irrational ratio
/// bounds because x -> x^2 + x - 1 and x -> x^2 - x - 1 are increasing on
/// x > 0.
inline bool in_golden_region(const Rational& a, const Rational& b) {
    if (!a.is_positive() || !b.is_positive())
        throw std::domain_error("in_golden_region requires positive inputs");
    // Clear denominators: with a = p/q, b = r/s the tests reduce to integer
    // sign checks on (rq)^2 +- (pq rs) - (ps)^2.
    const BigInt p = a.num(), q = a.den(), r = b.num(), s = b.den();
    const BigInt b2 = r * q * r * q;
    const BigInt ab = p * s * r * q;
    const BigInt a2 = p * s * p * s;
    return b2 + ab - a2 >= 0 && b2 - ab - a2 <= 0;
}

}  // namespace bcz
