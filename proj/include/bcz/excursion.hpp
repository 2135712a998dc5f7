#pragma once

#include "bcz/dynamics.hpp"
#include "bcz/farey.hpp"
#include "bcz/farey_point.hpp"
#include "bcz/half_integer.hpp"
#include "bcz/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bcz {

/// A point of the moduli space Xi = (0,1]^2; one excursion per point, the
/// coordinates being the x-coordinates of its two endpoints.
struct ModuliPoint {
    Rational a;
    Rational b;

    ModuliPoint(Rational a_, Rational b_) : a(std::move(a_)), b(std::move(b_)) {
        if (!a.is_positive() || a > Rational(1) || !b.is_positive() || b > Rational(1))
            throw std::domain_error("moduli point must lie in (0,1]^2");
    }

    ModuliPoint swapped() const { return ModuliPoint(b, a); }

    std::string to_string() const { return "(" + a.to_string() + ", " + b.to_string() + ")"; }
};

namespace detail {

struct ScaledModuli {
    std::int64_t a_num;  // a = a_num / den
    std::int64_t b_num;  // b = b_num / den
    std::int64_t den;
};

inline ScaledModuli scale_moduli(const ModuliPoint& m) {
    if (m.a.den() > kMaxDenominator || m.b.den() > kMaxDenominator)
        throw std::domain_error("moduli denominator exceeds 2^31");
    const std::int64_t da = static_cast<std::int64_t>(m.a.den());
    const std::int64_t db = static_cast<std::int64_t>(m.b.den());
    const std::int64_t d = std::lcm(da, db);
    if (d > kMaxDenominator) throw std::domain_error("shared moduli denominator exceeds 2^31");
    return ScaledModuli{static_cast<std::int64_t>(m.a.num()) * (d / da),
                        static_cast<std::int64_t>(m.b.num()) * (d / db), d};
}

}  // namespace detail

/// Exact streaming walk over the unique excursion of m: the orbit starts at
/// (a, b + floor((1-b)/a) a) and runs until the x-coordinate returns to b.
///
/// visit(i, rec, zeta_i, next) is called for i = 1..s with rec the step
/// record at T^{i-1}, zeta_i the running sum of k_hat - 3 (so zeta_s is the
/// reset total), and next = T^i. Returns the length s.
///
/// The endpoint identity a_{s-1} = a_0 + floor((1-a_0)/a_s) a_s is asserted
/// on every construction; interior depth a_i > max(a_0, a_s) only when
/// verify_interior is set.
template <typename Visitor>
std::int64_t walk_excursion(const ModuliPoint& m, Visitor&& visit, bool verify_interior = false) {
    const auto sm = detail::scale_moduli(m);
    const std::int64_t c = (sm.den - sm.b_num) / sm.a_num;
    FareyPoint cur(sm.a_num, c * sm.a_num + sm.b_num, sm.den);

    const std::int64_t interior_floor = std::max(sm.a_num, sm.b_num);
    HalfInteger zeta;
    std::int64_t i = 0;
    std::int64_t prev_x = cur.x_num;
    for (;;) {
        ++i;
        const StepRecord rec = StepRecord::at(cur);
        zeta += rec.k_hat - HalfInteger::from_integer(3);
        const FareyPoint nxt(cur.y_num, rec.k * cur.y_num - cur.x_num, cur.den);
        visit(i, rec, zeta, nxt);
        if (nxt.x_num <= sm.b_num) {
            if (nxt.x_num != sm.b_num)
                throw std::logic_error("excursion overshot its endpoint at " + m.to_string());
            // a_{s-1} = a_0 + floor((1-a_0)/a_s) a_s
            const std::int64_t expect = sm.a_num + ((sm.den - sm.a_num) / sm.b_num) * sm.b_num;
            if (i > 1 && prev_x != expect)
                throw std::logic_error("endpoint identity for a_{s-1} failed at " + m.to_string());
            return i;
        }
        if (verify_interior && nxt.x_num <= interior_floor)
            throw std::logic_error("interior depth violated at " + m.to_string());
        prev_x = nxt.x_num;
        cur = nxt;
    }
}

/// O(1)-memory facts about one excursion's zeta series (partial sums of
/// k_hat - 3): the reset total, the two boundary sums, the range of the
/// interior sums over m in [2, s-2], and the energy.
struct ExcursionSummary {
    std::int64_t length = 0;  // s
    HalfInteger zeta_1;
    HalfInteger zeta_s_minus_1;  // zeta_0 = 0 when s == 1
    HalfInteger zeta_s;
    std::optional<HalfInteger> interior_min;
    std::optional<HalfInteger> interior_max;
    BigInt energy_twice;  // 2 * sum |zeta_i|

    Rational energy() const { return Rational(energy_twice, BigInt(2)); }
};

namespace detail {

/// Streaming summary collector shared by build_excursion and the sweeps.
class SummaryCollector {
public:
    void feed(std::int64_t i, HalfInteger zeta_i) {
        if (i == 1) summary_.zeta_1 = zeta_i;
        summary_.energy_twice += zeta_i.abs().twice_value();
        // Two-step delay folds exactly the interior window [2, s-2].
        if (i >= 4) {
            if (!summary_.interior_min || prev2_ < *summary_.interior_min)
                summary_.interior_min = prev2_;
            if (!summary_.interior_max || prev2_ > *summary_.interior_max)
                summary_.interior_max = prev2_;
        }
        prev2_ = prev1_;
        prev1_ = zeta_i;
        summary_.zeta_s_minus_1 = prev2_;
        summary_.zeta_s = zeta_i;
    }

    ExcursionSummary finish(std::int64_t length) {
        summary_.length = length;
        if (length == 1) summary_.zeta_s_minus_1 = HalfInteger();
        return std::move(summary_);
    }

private:
    ExcursionSummary summary_;
    HalfInteger prev1_, prev2_;
};

}  // namespace detail

/// Summary-only walk; no per-point storage regardless of length.
inline ExcursionSummary excursion_summary(const ModuliPoint& m, bool verify_interior = false) {
    detail::SummaryCollector collector;
    const std::int64_t s = walk_excursion(
        m,
        [&](std::int64_t i, const StepRecord&, HalfInteger zeta_i, const FareyPoint&) {
            collector.feed(i, zeta_i);
        },
        verify_interior);
    return collector.finish(s);
}

struct BuildOptions {
    bool verify_interior = false;
    std::int64_t materialize_threshold = 1'000'000;
};

/// The unique excursion of a moduli point: its points and zeta series
/// (materialized up to BuildOptions::materialize_threshold steps) plus the
/// always-present summary.
struct Excursion {
    ModuliPoint moduli;
    FareyPoint start;  // (a_0, b_0)
    ExcursionSummary summary;
    bool materialized = false;
    std::vector<FareyPoint> points;  // T^0 .. T^s when materialized
    std::vector<HalfInteger> zeta;   // zeta_1 .. zeta_s when materialized

    std::int64_t length() const { return summary.length; }
    Rational energy() const { return summary.energy(); }
};

inline Excursion build_excursion(const ModuliPoint& m, const BuildOptions& opts = {}) {
    Excursion e{m, FareyPoint(), ExcursionSummary{}, true, {}, {}};
    detail::SummaryCollector collector;
    const std::int64_t s = walk_excursion(
        m,
        [&](std::int64_t i, const StepRecord& rec, HalfInteger zeta_i, const FareyPoint& next) {
            if (i == 1) {
                e.start = rec.point;
                if (e.materialized) e.points.push_back(rec.point);
            }
            if (e.materialized) {
                if (i <= opts.materialize_threshold) {
                    e.points.push_back(next);
                    e.zeta.push_back(zeta_i);
                } else {
                    e.materialized = false;
                    e.points.clear();
                    e.points.shrink_to_fit();
                    e.zeta.clear();
                    e.zeta.shrink_to_fit();
                }
            }
            collector.feed(i, zeta_i);
        },
        opts.verify_interior);
    e.summary = collector.finish(s);
    return e;
}

/// Brute-force oracle for the primitive-point correspondence: all coprime
/// (u,v) with u a + v b <= 1, sorted by strictly increasing v/u. The i-th
/// pair reproduces the i-th interior x-coordinate as u_i a + v_i b.
inline std::vector<std::pair<std::int64_t, std::int64_t>> primitive_points(const ModuliPoint& m) {
    const auto sm = detail::scale_moduli(m);
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const std::int64_t u_max = (sm.den - sm.b_num) / sm.a_num;
    for (std::int64_t u = 1; u <= u_max; ++u) {
        const std::int64_t v_max = (sm.den - u * sm.a_num) / sm.b_num;
        for (std::int64_t v = 1; v <= v_max; ++v)
            if (std::gcd(u, v) == 1) out.emplace_back(u, v);
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
        return l.second * r.first < r.second * l.first;  // v/u ascending
    });
    return out;
}

/// Exact length plus the ratio s * ab * pi^2 / 3, which tends to 1 as the
/// endpoints shrink.
struct LengthEstimate {
    std::int64_t s = 0;
    double ratio = 0.0;
};

inline LengthEstimate excursion_length_estimate(const ModuliPoint& m) {
    const std::int64_t s =
        walk_excursion(m, [](std::int64_t, const StepRecord&, HalfInteger, const FareyPoint&) {});
    constexpr double kPiSquaredOverThree = 3.2898681336964524;
    const double ab = m.a.to_double() * m.b.to_double();
    return LengthEstimate{s, static_cast<double>(s) * ab * kPiSquaredOverThree};
}

/// The reverse excursion: moduli (b, a). Reversal of the underlying orbit,
/// so the length is preserved.
inline Excursion reverse_excursion(const Excursion& e, const BuildOptions& opts = {}) {
    Excursion rev = build_excursion(e.moduli.swapped(), opts);
    if (rev.length() != e.length())
        throw std::logic_error("reversal changed excursion length at " + e.moduli.to_string());
    return rev;
}

/// Reset control: zeta_s lies strictly inside
/// (a_s/a_0 + a_0/a_s - 4, a_s/a_0 + a_0/a_s - 2), and |zeta_s| is strictly
/// below a_s/a_0 + a_0/a_s.
struct ResetCheck {
    Rational lower;
    Rational value;
    Rational upper;
};

inline ResetCheck reset_check_summary(const ModuliPoint& m, const ExcursionSummary& s) {
    const Rational ratio_sum = m.b / m.a + m.a / m.b;
    ResetCheck out{ratio_sum - Rational(4), s.zeta_s.to_rational(), ratio_sum - Rational(2)};
    if (!(out.lower < out.value && out.value < out.upper))
        throw std::logic_error("reset-control interval violated at " + m.to_string() +
                               ": zeta_s = " + out.value.to_string());
    if (!(out.value.abs() < ratio_sum))
        throw std::logic_error("reset-control corollary |zeta_s| < a_s/a_0 + a_0/a_s violated at " +
                               m.to_string());
    return out;
}

inline ResetCheck reset_sum_check(const Excursion& e) {
    return reset_check_summary(e.moduli, e.summary);
}

/// theta at the reset index r_i (the Farey position of 1/i), asserted to lie
/// in the open interval (i + 1/i - 4, i + 1/i - 2).
inline Rational theta_reset_at_r_i(std::int64_t n, std::int64_t i) {
    if (n < 1) throw std::domain_error("Farey order must be >= 1");
    if (i < 1 || i > n) throw std::domain_error("reset index i must satisfy 1 <= i <= n");
    FareyStream farey(n);
    farey.next();  // rho_0
    OrbitStream orbit(FareyPoint(1, n, n), farey_length(n).a_n);
    HalfInteger theta;
    while (auto f = farey.next()) {
        auto rec = orbit.next();
        if (!rec) throw std::logic_error("orbit ended before Farey stream");
        theta += rec->k_hat - HalfInteger::from_integer(3);
        if (f->p == 1 && f->q == i) {
            const Rational value = theta.to_rational();
            const Rational mid = Rational(i) + Rational(1, i);
            if (!(mid - Rational(4) < value && value < mid - Rational(2)))
                throw std::logic_error("theta reset interval violated at n=" + std::to_string(n) +
                                       ", i=" + std::to_string(i));
            return value;
        }
    }
    throw std::logic_error("1/i not found in Farey sequence");
}

/// Overall monotonicity: for s >= 4, zeta_{s-1} < zeta_m < zeta_1 for every
/// m in [2, s-2]. The endpoint bounds zeta_1 <= 1/a_0 - 2 and
/// zeta_{s-1} > -1/a_0 - 2/a_s + 2 are theorems and asserted here.
inline bool monotonicity_check_summary(const ModuliPoint& m, const ExcursionSummary& s) {
    if (s.length < 4) throw std::domain_error("excursion too short for monotonicity");
    const Rational inv_a0 = Rational(1) / m.a;
    const Rational inv_as = Rational(1) / m.b;
    if (!(s.zeta_1.to_rational() <= inv_a0 - Rational(2)))
        throw std::logic_error("zeta_1 <= 1/a_0 - 2 violated at " + m.to_string());
    if (!(s.zeta_s_minus_1.to_rational() > -inv_a0 - Rational(2) * inv_as + Rational(2)))
        throw std::logic_error("zeta_{s-1} lower bound violated at " + m.to_string());
    return s.interior_min && s.interior_max && s.zeta_s_minus_1 < *s.interior_min &&
           *s.interior_max < s.zeta_1;
}

inline bool monotonicity_check(const Excursion& e) {
    return monotonicity_check_summary(e.moduli, e.summary);
}

/// Energy E(f; a, b) = sum_{i=1..s} |zeta_i| with zeta the partial sums of f
/// along the excursion. Exact for exact-valued f.
inline Rational energy(const TriangleFunction& f, const ModuliPoint& m) {
    Rational partial(0);
    Rational total(0);
    walk_excursion(m, [&](std::int64_t, const StepRecord& rec, HalfInteger, const FareyPoint&) {
        partial += f(rec.point);
        total += partial.abs();
    });
    return total;
}

/// Fast exact path for f = k_hat - 3.
inline Rational energy_khat(const ModuliPoint& m) {
    BigInt twice = 0;
    walk_excursion(m, [&](std::int64_t, const StepRecord&, HalfInteger zeta, const FareyPoint&) {
        twice += zeta.abs().twice_value();
    });
    return Rational(twice, BigInt(2));
}

/// Bound checks around the energy function. When max(1/a, 1/b) <= d the
/// energy obeys E <= 2 d^5; when max(1/a, 1/b) > sqrt(5)+2 inside the golden
/// region, 2a + b < 1 and a + 2b < 1.
struct EnergyBoundReport {
    Rational energy_value;
    bool d_bound_checked = false;
    Rational d_bound;
    bool slope_bound_checked = false;
};

inline EnergyBoundReport energy_bound_checks(const ModuliPoint& m, const Rational& d) {
    if (d < Rational(1)) throw std::domain_error("d must be >= 1");
    EnergyBoundReport out{energy_khat(m), false, Rational(0), false};
    const Rational min_ab = m.a < m.b ? m.a : m.b;

    if (min_ab >= Rational(1) / d) {  // max(1/a, 1/b) <= d
        out.d_bound_checked = true;
        out.d_bound = Rational(2) * d * d * d * d * d;
        if (out.energy_value > out.d_bound)
            throw std::logic_error("energy bound E <= 2 d^5 violated at " + m.to_string());
    }

    // max(1/a,1/b) > sqrt(5)+2  <=>  min(a,b) < sqrt(5)-2  <=>  (min+2)^2 < 5.
    const Rational shifted = min_ab + Rational(2);
    if (shifted * shifted < Rational(5) && in_golden_region(m.a, m.b)) {
        out.slope_bound_checked = true;
        if (!(Rational(2) * m.a + m.b < Rational(1) && m.a + Rational(2) * m.b < Rational(1)))
            throw std::logic_error("golden-region slope bound violated at " + m.to_string());
    }
    return out;
}

/// True iff (i1, i2) delimit a sub-excursion of e: every x-coordinate
/// strictly between exceeds both x_{i1} and x_{i2}. (The delimited segment is
/// then itself the unique excursion of (x_{i1}, x_{i2}).)
inline bool is_sub_excursion(const Excursion& e, std::int64_t i1, std::int64_t i2) {
    if (!e.materialized)
        throw std::domain_error("sub-excursion checks need a materialized excursion");
    if (i1 < 0 || i2 <= i1 || i2 > e.length()) return false;
    const std::int64_t lo = e.points[static_cast<std::size_t>(i1)].x_num;
    const std::int64_t hi = e.points[static_cast<std::size_t>(i2)].x_num;
    for (std::int64_t i = i1 + 1; i < i2; ++i) {
        const std::int64_t x = e.points[static_cast<std::size_t>(i)].x_num;
        if (x <= lo || x <= hi) return false;
    }
    return true;
}

/// Energy of the sub-excursion delimited by (i1, i2), read off the parent's
/// zeta series: sum_{m=i1+1..i2} |zeta_m - zeta_{i1}|.
inline Rational sub_excursion_energy(const Excursion& e, std::int64_t i1, std::int64_t i2) {
    if (!is_sub_excursion(e, i1, i2))
        throw std::domain_error("indices do not delimit a sub-excursion");
    const HalfInteger base = i1 == 0 ? HalfInteger() : e.zeta[static_cast<std::size_t>(i1) - 1];
    BigInt twice = 0;
    for (std::int64_t m = i1 + 1; m <= i2; ++m)
        twice += (e.zeta[static_cast<std::size_t>(m) - 1] - base).abs().twice_value();
    return Rational(twice, BigInt(2));
}

/// Sub-excursion inequality: sum_{m=i1+1..i2} |zeta_m| <= (i2-i1) |zeta_{i1}| +
/// E(c, d) with (c, d) the sub-excursion's endpoints. Exact comparison.
inline bool sub_excursion_inequality_check(const Excursion& e, std::int64_t i1, std::int64_t i2) {
    if (!is_sub_excursion(e, i1, i2))
        throw std::domain_error("indices do not delimit a sub-excursion");
    const HalfInteger base = i1 == 0 ? HalfInteger() : e.zeta[static_cast<std::size_t>(i1) - 1];
    BigInt lhs_twice = 0;
    for (std::int64_t m = i1 + 1; m <= i2; ++m)
        lhs_twice += e.zeta[static_cast<std::size_t>(m) - 1].abs().twice_value();
    const Rational lhs(lhs_twice, BigInt(2));
    const Rational rhs =
        Rational(i2 - i1) * base.abs().to_rational() + sub_excursion_energy(e, i1, i2);
    return lhs <= rhs;
}

}  // namespace bcz
