#pragma once

#include "bcz/farey.hpp"
#include "bcz/farey_point.hpp"
#include "bcz/half_integer.hpp"
#include "bcz/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcz {

/// One orbit step: the point itself plus its itinerary data and return time.
struct StepRecord {
    FareyPoint point;
    std::int64_t k = 0;    // itinerary k(a,b) = floor((1+a)/b)
    std::int64_t k_t = 0;  // transpose itinerary k(b,a)
    HalfInteger k_hat;
    Rational r;  // return time 1/(ab)

    static StepRecord at(const FareyPoint& p) {
        StepRecord rec;
        rec.point = p;
        rec.k = p.itinerary();
        rec.k_t = p.itinerary_t();
        rec.k_hat = HalfInteger::from_twice(checked_add(rec.k, rec.k_t));
        rec.r = p.return_time();
        return rec;
    }
};

/// One application of T(a,b) = (b, floor((1+a)/b) b - a), in pure integer
/// arithmetic on the shared-denominator numerators.
inline FareyPoint bcz_step(const FareyPoint& p) {
    if (!in_farey_triangle(p)) throw std::domain_error("not in Farey triangle: " + p.to_string());
    const std::int64_t k = (p.den + p.x_num) / p.y_num;
    return FareyPoint(p.y_num, k * p.y_num - p.x_num, p.den);
}

inline std::pair<FareyPoint, StepRecord> bcz_step_with_record(const FareyPoint& p) {
    StepRecord rec = StepRecord::at(p);
    return {FareyPoint(p.y_num, rec.k * p.y_num - p.x_num, p.den), rec};
}

/// T^{-1}, via the reverse-orbit identity: swap, step, swap back.
inline FareyPoint bcz_step_inverse(const FareyPoint& p) {
    return bcz_step(p.swapped()).swapped();
}

/// Sequential iterator over T^0(start), T^1(start), ... with per-step records.
class OrbitStream {
public:
    OrbitStream(FareyPoint start, std::int64_t steps) : current_(start), remaining_(steps) {
        if (steps < 0) throw std::domain_error("steps must be >= 0");
        if (!in_farey_triangle(start))
            throw std::domain_error("not in Farey triangle: " + start.to_string());
    }

    std::optional<StepRecord> next() {
        if (remaining_ == 0) return std::nullopt;
        --remaining_;
        auto [nxt, rec] = bcz_step_with_record(current_);
        if (!in_farey_triangle(nxt))
            throw std::logic_error("BCZ step left the Farey triangle: " + nxt.to_string());
        current_ = nxt;
        return rec;
    }

private:
    FareyPoint current_;
    std::int64_t remaining_;
};

/// Exact partial-sum series along the periodic orbit of (1/n, 1).
struct CocycleSeries {
    enum class Kind { theta, iota, custom };
    std::int64_t n = 0;
    Kind kind = Kind::custom;
    std::vector<HalfInteger> theta_terms;  // populated for kind == theta
    std::vector<Rational> rational_terms;  // populated for kind == iota / custom
};

/// theta_i = sum_{j<=i} (k_hat(T^{j-1}(1/n,1)) - 3), i = 1..A_n.
/// The terminal value is exactly -1 for every n.
inline CocycleSeries theta_series(std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    const std::int64_t a_n = farey_length(n).a_n;
    CocycleSeries out;
    out.n = n;
    out.kind = CocycleSeries::Kind::theta;
    out.theta_terms.reserve(static_cast<std::size_t>(a_n));
    OrbitStream orbit(FareyPoint(1, n, n), a_n);
    HalfInteger acc;
    while (auto rec = orbit.next()) {
        acc += rec->k_hat - HalfInteger::from_integer(3);
        out.theta_terms.push_back(acc);
    }
    return out;
}

/// Streaming sum of |theta_i| over the full period, exact. The per-step
/// accumulator is a half-integer; the total is carried as a big integer of
/// twice the value.
inline Rational theta_abs_sum(std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    const std::int64_t a_n = farey_length(n).a_n;
    OrbitStream orbit(FareyPoint(1, n, n), a_n);
    HalfInteger acc;
    BigInt total_twice = 0;
    while (auto rec = orbit.next()) {
        acc += rec->k_hat - HalfInteger::from_integer(3);
        total_twice += acc.abs().twice_value();
    }
    return Rational(total_twice, BigInt(2));
}

/// iota_i = n^2 (rho_i - i/A_n), computed term-wise from the closed form
/// n^2 (p_i A_n - i q_i) / (q_i A_n) so no summation error can accumulate.
inline CocycleSeries iota_series(std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    const std::int64_t a_n = farey_length(n).a_n;
    CocycleSeries out;
    out.n = n;
    out.kind = CocycleSeries::Kind::iota;
    out.rational_terms.reserve(static_cast<std::size_t>(a_n));
    FareyStream farey(n);
    farey.next();  // skip rho_0 = 0/1
    while (auto f = farey.next()) {
        const BigInt numer = BigInt(n) * n * (BigInt(f->p) * a_n - BigInt(f->index) * f->q);
        out.rational_terms.emplace_back(numer, BigInt(f->q) * a_n);
    }
    return out;
}

/// Streaming exact sum of |iota_i|.
///
/// Terms are bucketed by denominator q: sum |iota_i| =
/// (n^2/A_n) * sum_q (1/q) * sum_{i: q_i=q} |p_i A_n - i q|, with the inner
/// sums in plain integers, so only n rational additions happen at the end.
inline Rational iota_abs_sum(std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    const std::int64_t a_n = farey_length(n).a_n;
    std::vector<BigInt> bucket(static_cast<std::size_t>(n) + 1, BigInt(0));
    FareyStream farey(n);
    farey.next();
    while (auto f = farey.next()) {
        std::int64_t t;
        bool overflow = __builtin_mul_overflow(f->p, a_n, &t);
        std::int64_t u;
        overflow = overflow || __builtin_mul_overflow(f->index, f->q, &u);
        if (!overflow) {
            std::int64_t diff;
            overflow = __builtin_sub_overflow(t, u, &diff);
            if (!overflow) {
                bucket[static_cast<std::size_t>(f->q)] += diff < 0 ? -diff : diff;
                continue;
            }
        }
        // Promote: exact big-integer fallback for very large n.
        BigInt d = BigInt(f->p) * a_n - BigInt(f->index) * f->q;
        bucket[static_cast<std::size_t>(f->q)] += d < 0 ? -d : d;
    }
    Rational total(0);
    for (std::int64_t q = 1; q <= n; ++q) {
        const BigInt& s = bucket[static_cast<std::size_t>(q)];
        if (s != 0) total += Rational(s, BigInt(q));
    }
    return total * Rational(BigInt(n) * n, BigInt(a_n));
}

/// chi^(n)(i, p) = sum_{j=1..i} (R(T^{j-1} p) - n^2/A_n).
inline Rational cocycle(std::int64_t n, std::int64_t i, const FareyPoint& p) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    if (i < 0) throw std::domain_error("cocycle index must be >= 0");
    const Rational mean(BigInt(n) * n, BigInt(farey_length(n).a_n));
    Rational acc(0);
    OrbitStream orbit(p, i);
    while (auto rec = orbit.next()) acc += rec->r - mean;
    return acc;
}

/// Both sides of the cocycle identity
/// chi(i1+i2, p) = chi(i2, T^{i1} p) + chi(i1, p), evaluated independently.
struct CocycleIdentity {
    Rational combined;    // chi(i1+i2, p)
    Rational split_sum;   // chi(i2, T^{i1} p) + chi(i1, p)
    bool holds() const { return combined == split_sum; }
};

inline CocycleIdentity cocycle_identity(std::int64_t n, std::int64_t i1, std::int64_t i2,
                                        const FareyPoint& p) {
    CocycleIdentity out;
    out.combined = cocycle(n, i1 + i2, p);
    FareyPoint q = p;
    for (std::int64_t j = 0; j < i1; ++j) q = bcz_step(q);
    out.split_sum = cocycle(n, i2, q) + cocycle(n, i1, p);
    return out;
}

/// A total exact-valued function on the Farey triangle.
using TriangleFunction = std::function<Rational(const FareyPoint&)>;

/// F_n(g) = sum_{i=1}^{A_n} |sum_{j=0}^{i-1} (g(T^j(1/n,1)) - mean_n(g))|,
/// the L^1 functional of mean-centered partial sums along the period.
/// Exact whenever g returns exact rationals.
inline Rational f_n_functional(const TriangleFunction& g, std::int64_t n) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    const std::int64_t a_n = farey_length(n).a_n;
    const FareyPoint start(1, n, n);

    Rational sum(0);
    {
        OrbitStream orbit(start, a_n);
        while (auto rec = orbit.next()) sum += g(rec->point);
    }
    const Rational mean = sum / Rational(a_n);

    Rational partial(0);
    Rational total(0);
    OrbitStream orbit(start, a_n);
    while (auto rec = orbit.next()) {
        partial += g(rec->point) - mean;
        total += partial.abs();
    }
    return total;
}

/// Deterministic exact sampler for the Farey triangle: numerators drawn
/// uniformly from a den x den grid (den a fixed prime), rejecting the
/// complement of the triangle.
class TriangleSampler {
public:
    static constexpr std::int64_t kDefaultDen = 1'000'003;

    explicit TriangleSampler(std::uint64_t seed, std::int64_t den = kDefaultDen)
        : den_(den), rng_(seed), dist_(1, den) {}

    FareyPoint next() {
        for (;;) {
            const std::int64_t x = dist_(rng_);
            const std::int64_t y = dist_(rng_);
            if (x + y > den_) return FareyPoint(x, y, den_);
        }
    }

private:
    std::int64_t den_;
    std::mt19937_64 rng_;
    std::uniform_int_distribution<std::int64_t> dist_;
};

/// Interval bounds for R - k_hat in one (k, k^T) class of the case list.
struct RMinusKhatCase {
    std::int64_t k = 0, k_t = 0;
    Rational lower;       // inclusive unless lower_open
    bool lower_open = false;
    Rational upper;       // always exclusive
    std::int64_t count = 0;
    std::optional<Rational> min_seen;
    std::optional<Rational> max_seen;
};

struct RMinusKhatReport {
    std::int64_t samples = 0;
    std::int64_t violations = 0;
    std::vector<RMinusKhatCase> cases;
};

namespace detail {

/// Case bounds from the itinerary pair, normalized so k <= k_t.
inline RMinusKhatCase khat_case_bounds(std::int64_t k, std::int64_t k_t) {
    RMinusKhatCase c;
    c.k = k;
    c.k_t = k_t;
    const std::int64_t lo = k < k_t ? k : k_t;
    const std::int64_t hi = k < k_t ? k_t : k;
    if (lo == 2 && hi == 2) {
        c.lower = Rational(-1);
        c.upper = Rational(2);
    } else if (lo == 1 && hi == 2) {
        c.lower = Rational(-1, 2);
        c.lower_open = true;
        c.upper = Rational(7, 12);
    } else if (lo == 2 && hi == 3) {
        c.lower = Rational(-5, 12);
        c.upper = Rational(5, 3);
    } else if (lo == 1 && hi == 3) {
        c.lower = Rational(-1, 2);
        c.upper = Rational(19, 15);
    } else if (lo == 2 && hi == 4) {
        c.lower = Rational(4, 15);
        c.upper = Rational(3, 2);
    } else if (lo == 1 && hi >= 4) {
        c.lower = Rational(-1, 2);
        c.upper = Rational(3, 2) + Rational(2, hi);
    } else {
        throw std::logic_error("impossible itinerary pair (" + std::to_string(k) + ", " +
                               std::to_string(k_t) + ")");
    }
    return c;
}

}  // namespace detail

/// Evaluate R - k_hat at p and check it against the global band [-1, 2) and
/// the per-class interval. Throws with the witness point on violation.
inline Rational r_minus_khat_checked(const FareyPoint& p) {
    const StepRecord rec = StepRecord::at(p);
    const Rational diff = rec.r - rec.k_hat.to_rational();
    if (diff < Rational(-1) || diff >= Rational(2))
        throw std::logic_error("global bound -1 <= R - k_hat < 2 violated at " + p.to_string());
    const RMinusKhatCase c = detail::khat_case_bounds(rec.k, rec.k_t);
    const bool below = c.lower_open ? diff <= c.lower : diff < c.lower;
    if (below || diff >= c.upper)
        throw std::logic_error("case (" + std::to_string(rec.k) + ", " + std::to_string(rec.k_t) +
                               ") bound violated at " + p.to_string());
    return diff;
}

/// Sample random triangle points, bucket by (k, k^T), and assert the global
/// and per-case bounds of the case list everywhere.
inline RMinusKhatReport r_minus_khat_bounds_check(std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::domain_error("samples must be >= 1");
    TriangleSampler sampler(seed);
    RMinusKhatReport report;
    report.samples = samples;
    auto find_case = [&report](std::int64_t k, std::int64_t k_t) -> RMinusKhatCase& {
        const std::int64_t lo = k < k_t ? k : k_t;
        const std::int64_t hi = k < k_t ? k_t : k;
        for (auto& c : report.cases)
            if (c.k == lo && c.k_t == hi) return c;
        report.cases.push_back(detail::khat_case_bounds(lo, hi));
        return report.cases.back();
    };
    for (std::int64_t i = 0; i < samples; ++i) {
        const FareyPoint p = sampler.next();
        const StepRecord rec = StepRecord::at(p);
        const Rational diff = r_minus_khat_checked(p);
        auto& c = find_case(rec.k, rec.k_t);
        ++c.count;
        if (!c.min_seen || diff < *c.min_seen) c.min_seen = diff;
        if (!c.max_seen || diff > *c.max_seen) c.max_seen = diff;
    }
    return report;
}

}  // namespace bcz
