#pragma once

#include "bcz/rational.hpp"

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcz {

/// Checked signed 64-bit addition; the orbit sums this library forms stay far
/// below the limit, so an overflow means corrupted input and must not wrap.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 addition overflow");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 subtraction overflow");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 multiplication overflow");
    return r;
}

/// An exact multiple of 1/2, stored as twice its value.
///
/// k_hat = (k + k^T)/2 is an average of two integers, so it and all theta /
/// zeta partial sums are half-integers; this keeps them exact without the
/// weight of a full Rational.
class HalfInteger {
public:
    HalfInteger() : twice_(0) {}
    static HalfInteger from_twice(std::int64_t t) {
        HalfInteger h;
        h.twice_ = t;
        return h;
    }
    static HalfInteger from_integer(std::int64_t v) { return from_twice(checked_mul(v, 2)); }

    std::int64_t twice_value() const { return twice_; }

    bool is_zero() const { return twice_ == 0; }

    HalfInteger operator-() const { return from_twice(-twice_); }
    HalfInteger abs() const { return twice_ < 0 ? -*this : *this; }

    friend HalfInteger operator+(HalfInteger a, HalfInteger b) {
        return from_twice(checked_add(a.twice_, b.twice_));
    }
    friend HalfInteger operator-(HalfInteger a, HalfInteger b) {
        return from_twice(checked_sub(a.twice_, b.twice_));
    }

    HalfInteger& operator+=(HalfInteger o) { return *this = *this + o; }
    HalfInteger& operator-=(HalfInteger o) { return *this = *this - o; }

    friend bool operator==(HalfInteger a, HalfInteger b) = default;
    friend std::strong_ordering operator<=>(HalfInteger a, HalfInteger b) = default;

    /// Exact conversion: value = twice/2.
    Rational to_rational() const { return Rational(twice_, 2); }

    double to_double() const { return static_cast<double>(twice_) / 2.0; }

    std::string to_string() const { return to_rational().to_string(); }

private:
    std::int64_t twice_;
};

}  // namespace bcz
