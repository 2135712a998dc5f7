#pragma once

#include "bcz/half_integer.hpp"
#include "bcz/rational.hpp"

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bcz {

/// Largest shared denominator the integer fast path supports. Keeps every
/// intermediate product (den + num, k * num) inside int64.
inline constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 31;

/// A point (a, b) of the Farey triangle stored exactly as two integer
/// numerators over one shared positive denominator: a = x_num/den,
/// b = y_num/den.
///
/// Valid points satisfy 0 < x_num <= den, 0 < y_num <= den,
/// x_num + y_num > den, which is exactly a, b in (0,1], a + b > 1.
struct FareyPoint {
    std::int64_t x_num = 1;
    std::int64_t y_num = 1;
    std::int64_t den = 1;

    FareyPoint() = default;
    FareyPoint(std::int64_t x, std::int64_t y, std::int64_t d) : x_num(x), y_num(y), den(d) {
        if (den <= 0) throw std::domain_error("FareyPoint denominator must be positive");
        if (den > kMaxDenominator) throw std::domain_error("FareyPoint denominator exceeds 2^31");
    }

    static FareyPoint from_rationals(const Rational& a, const Rational& b) {
        if (a.den() > kMaxDenominator || b.den() > kMaxDenominator)
            throw std::domain_error("coordinate denominator exceeds 2^31");
        const std::int64_t da = static_cast<std::int64_t>(a.den());
        const std::int64_t db = static_cast<std::int64_t>(b.den());
        const std::int64_t d = std::lcm(da, db);
        if (d > kMaxDenominator) throw std::domain_error("shared denominator exceeds 2^31");
        if (a.num() < 0 || a.num() > a.den() || b.num() < 0 || b.num() > b.den())
            throw std::domain_error("coordinates must lie in (0,1]");
        const std::int64_t x = static_cast<std::int64_t>(a.num()) * (d / da);
        const std::int64_t y = static_cast<std::int64_t>(b.num()) * (d / db);
        return FareyPoint(x, y, d);
    }

    Rational x() const { return Rational(x_num, den); }
    Rational y() const { return Rational(y_num, den); }

    /// Return time R(a,b) = 1/(ab) = den^2 / (x_num * y_num).
    Rational return_time() const {
        return Rational(BigInt(den) * den, BigInt(x_num) * y_num);
    }

    /// Itinerary k(a,b) = floor((1+a)/b) = floor((den + x_num)/y_num).
    std::int64_t itinerary() const { return (den + x_num) / y_num; }

    /// Transpose itinerary k^T(a,b) = k(b,a).
    std::int64_t itinerary_t() const { return (den + y_num) / x_num; }

    HalfInteger k_hat() const {
        return HalfInteger::from_twice(checked_add(itinerary(), itinerary_t()));
    }

    FareyPoint swapped() const { return FareyPoint(y_num, x_num, den); }

    friend bool operator==(const FareyPoint& a, const FareyPoint& b) {
        // Shared denominators are not normalized, so compare cross products.
        return BigInt(a.x_num) * b.den == BigInt(b.x_num) * a.den &&
               BigInt(a.y_num) * b.den == BigInt(b.y_num) * a.den;
    }

    std::string to_string() const {
        return "(" + x().to_string() + ", " + y().to_string() + ")";
    }
};

/// Exact Farey-triangle membership: 0 < x <= 1, 0 < y <= 1, x + y > 1.
inline bool in_farey_triangle(const FareyPoint& p) {
    return p.x_num > 0 && p.x_num <= p.den && p.y_num > 0 && p.y_num <= p.den &&
           p.x_num + p.y_num > p.den;
}

}  // namespace bcz
