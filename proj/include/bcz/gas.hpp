#pragma once

#include "bcz/half_integer.hpp"
#include "bcz/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bcz {

/// Validation failure for generalized arithmetic sequences; index is 0-based.
class GasError : public std::domain_error {
public:
    GasError(std::string msg, std::size_t index)
        : std::domain_error(std::move(msg)), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

namespace detail {

/// Quotient (left + right) / mid if it is a positive integer.
inline std::optional<BigInt> gas_quotient(const Rational& left, const Rational& mid,
                                          const Rational& right) {
    const Rational q = (left + right) / mid;
    if (!q.is_integer() || !q.is_positive()) return std::nullopt;
    return q.num();
}

}  // namespace detail

/// A sequence of positive rationals where every term divides the sum of its
/// neighbors (quotient a positive integer); cyclic adds the wrap-around
/// divisibilities.
struct GasSeq {
    std::vector<Rational> terms;
    bool cyclic = false;

    std::size_t size() const { return terms.size(); }

    const Rational& at_wrapped(std::ptrdiff_t i) const {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(terms.size());
        return terms[static_cast<std::size_t>(((i % n) + n) % n)];
    }
};

/// Validate and wrap a term sequence. Throws GasError naming the first
/// failing 0-based index (nonpositive term or failed divisibility).
inline GasSeq validate_gas(std::vector<Rational> terms, bool cyclic) {
    if (terms.empty()) throw GasError("empty sequence", 0);
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (!terms[i].is_positive()) throw GasError("nonpositive term", i);

    const std::size_t n = terms.size();
    if (cyclic) {
        if (n >= 2) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto& prev = terms[(i + n - 1) % n];
                const auto& next = terms[(i + 1) % n];
                if (!detail::gas_quotient(prev, terms[i], next))
                    throw GasError("divisibility fails", i);
            }
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!detail::gas_quotient(terms[i - 1], terms[i], terms[i + 1]))
                throw GasError("divisibility fails", i);
        }
    }
    return GasSeq{std::move(terms), cyclic};
}

/// The integer quotients k_i = (a_{i-1} + a_{i+1}) / a_i. Interior positions
/// for non-cyclic sequences (needs >= 3 terms), all positions wrapped for
/// cyclic ones.
inline std::vector<BigInt> itinerary(const GasSeq& seq) {
    const std::size_t n = seq.size();
    std::vector<BigInt> out;
    if (seq.cyclic) {
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto q = detail::gas_quotient(seq.terms[(i + n - 1) % n], seq.terms[i],
                                          seq.terms[(i + 1) % n]);
            if (!q) throw GasError("divisibility fails", i);
            out.push_back(*q);
        }
    } else {
        if (n < 3) throw GasError("sequence too short for itinerary", 0);
        out.reserve(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            auto q = detail::gas_quotient(seq.terms[i - 1], seq.terms[i], seq.terms[i + 1]);
            if (!q) throw GasError("divisibility fails", i);
            out.push_back(*q);
        }
    }
    return out;
}

namespace detail {

inline bool is_strict_local_max(const GasSeq& seq, std::size_t m) {
    const std::size_t n = seq.size();
    if (seq.cyclic) {
        if (n < 2) return false;
        const auto& prev = seq.terms[(m + n - 1) % n];
        const auto& next = seq.terms[(m + 1) % n];
        return seq.terms[m] > prev && seq.terms[m] > next;
    }
    if (m == 0 || m + 1 >= n) return false;
    return seq.terms[m] > seq.terms[m - 1] && seq.terms[m] > seq.terms[m + 1];
}

}  // namespace detail

/// All strict local maxima (0-based indices). At each one the local-maximum
/// identity a_m = a_{m-1} + a_{m+1} is a theorem for valid sequences, so its
/// failure is reported as an internal-consistency error.
inline std::vector<std::size_t> find_local_maxima(const GasSeq& seq) {
    const std::size_t n = seq.size();
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < n; ++m) {
        if (!detail::is_strict_local_max(seq, m)) continue;
        const Rational& prev = seq.cyclic ? seq.at_wrapped(static_cast<std::ptrdiff_t>(m) - 1)
                                          : seq.terms[m - 1];
        const Rational& next = seq.cyclic ? seq.at_wrapped(static_cast<std::ptrdiff_t>(m) + 1)
                                          : seq.terms[m + 1];
        if (seq.terms[m] != prev + next)
            throw std::logic_error("local-maximum identity a_m = a_{m-1} + a_{m+1} violated at " +
                                   std::to_string(m));
        out.push_back(m);
    }
    return out;
}

/// Remove the local maximum at m; the result must revalidate (closure
/// theorem), so a validation failure is an internal-consistency error.
inline GasSeq eliminate(const GasSeq& seq, std::size_t m) {
    const std::size_t n = seq.size();
    if (m >= n) throw GasError("index out of range", m);
    if (seq.cyclic ? n < 2 : n < 3) throw GasError("sequence too short to eliminate", m);
    if (!detail::is_strict_local_max(seq, m)) throw GasError("not a strict local maximum", m);
    std::vector<Rational> shorter;
    shorter.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (i != m) shorter.push_back(seq.terms[i]);
    try {
        return validate_gas(std::move(shorter), seq.cyclic);
    } catch (const GasError& e) {
        throw std::logic_error(std::string("closure violated after elimination: ") + e.what());
    }
}

/// h over raw sequences (no divisibility needed), length >= 4:
/// sum over the n-3 consecutive 4-term windows of
/// ((a_i + a_{i+2})/a_{i+1} + (a_{i-1} + a_{i+1})/a_i)/2 - 3.
inline Rational h_value(const std::vector<Rational>& a) {
    const std::size_t n = a.size();
    if (n < 4) throw GasError("h needs at least 4 terms", 0);
    for (std::size_t i = 0; i < n; ++i)
        if (!a[i].is_positive()) throw GasError("nonpositive term", i);
    Rational total(0);
    for (std::size_t i = 1; i + 2 < n; ++i) {
        total += ((a[i] + a[i + 2]) / a[i + 1] + (a[i - 1] + a[i + 1]) / a[i]) / Rational(2) -
                 Rational(3);
    }
    return total;
}

/// h_hat: the cyclic window sum, defined for any length >= 1. For a cyclic
/// generalized arithmetic sequence it equals sum(k_i - 3).
inline Rational h_hat_value(const std::vector<Rational>& a) {
    const std::size_t n = a.size();
    if (n == 0) throw GasError("empty sequence", 0);
    for (std::size_t i = 0; i < n; ++i)
        if (!a[i].is_positive()) throw GasError("nonpositive term", i);
    auto at = [&](std::size_t i) -> const Rational& { return a[i % n]; };
    Rational total(0);
    for (std::size_t i = 0; i < n; ++i) {
        total += ((at(i) + at(i + 2)) / at(i + 1) + (at(i + n - 1) + at(i + 1)) / at(i)) /
                     Rational(2) -
                 Rational(3);
    }
    return total;
}

namespace detail {

/// Leftmost index of the maximum value.
inline std::size_t leftmost_largest(const std::vector<Rational>& terms) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i] > terms[best]) best = i;
    return best;
}

inline bool all_equal(const std::vector<Rational>& terms) {
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (!(terms[i] == terms[0])) return false;
    return true;
}

}  // namespace detail

/// Repeatedly eliminate a largest term while it is a strict local maximum,
/// and return the irreducible sequence with the preserved invariant (h_hat
/// for cyclic inputs, h for non-cyclic ones).
///
/// Largest terms tie-break leftmost. For non-cyclic sequences the h identity
/// only covers eliminations at 1-based indices in [4, n-3], so candidates are
/// restricted to that window and reduction stops when no largest term inside
/// it is a strict local maximum. Constant sequences are irreducible.
inline std::pair<GasSeq, Rational> reduce_to_simplest(GasSeq seq) {
    if (seq.cyclic) {
        while (seq.size() > 1 && !detail::all_equal(seq.terms)) {
            const std::size_t m = detail::leftmost_largest(seq.terms);
            if (!detail::is_strict_local_max(seq, m))
                throw std::logic_error(
                    "largest term with a strictly smaller comparator is not a local maximum");
            seq = eliminate(seq, m);
        }
        return {seq, h_hat_value(seq.terms)};
    }

    for (;;) {
        const std::size_t n = seq.size();
        if (n < 7) break;
        const Rational& maxv = seq.terms[detail::leftmost_largest(seq.terms)];
        // 1-based window [4, n-3] -> 0-based [3, n-4].
        std::optional<std::size_t> pick;
        for (std::size_t i = 3; i + 3 < n; ++i) {
            if (seq.terms[i] == maxv && detail::is_strict_local_max(seq, i)) {
                pick = i;
                break;
            }
        }
        if (!pick) break;
        seq = eliminate(seq, *pick);
    }
    return {seq, h_value(seq.terms)};
}

/// Fast integer path: h_hat of a cyclic integer sequence computed by
/// eliminating local maxima with a stack (each pop asserts the local-maximum
/// identity), then window-summing the irreducible remainder. O(n) amortized.
///
/// The caller's sequence is rotated so a global minimum leads; rotation does
/// not change h_hat.
inline BigInt h_hat_cyclic_by_elimination(const std::vector<std::int64_t>& input) {
    if (input.empty()) throw GasError("empty sequence", 0);
    std::size_t min_pos = 0;
    for (std::size_t i = 1; i < input.size(); ++i)
        if (input[i] < input[min_pos]) min_pos = i;

    std::vector<std::int64_t> stack;
    stack.reserve(64);
    auto pop_while_max = [&stack](std::int64_t incoming) {
        while (stack.size() >= 2) {
            const std::int64_t top = stack.back();
            const std::int64_t below = stack[stack.size() - 2];
            if (!(top > below && top > incoming)) break;
            if (top != below + incoming)
                throw std::logic_error("local-maximum identity violated during elimination");
            stack.pop_back();
        }
    };

    const std::size_t n = input.size();
    for (std::size_t off = 0; off < n; ++off) {
        const std::int64_t x = input[(min_pos + off) % n];
        pop_while_max(x);
        stack.push_back(x);
    }
    // Wrap-around eliminations against the leading minimum.
    while (stack.size() >= 3) {
        const std::int64_t top = stack.back();
        const std::int64_t below = stack[stack.size() - 2];
        const std::int64_t front = stack.front();
        if (!(top > below && top > front)) break;
        if (top != below + front)
            throw std::logic_error("local-maximum identity violated during elimination");
        stack.pop_back();
    }
    if (stack.size() == 2 && stack[1] > stack[0]) {
        if (stack[1] != stack[0] + stack[0])
            throw std::logic_error("local-maximum identity violated during elimination");
        stack.pop_back();
    }

    // Window-sum h_hat of the irreducible remainder.
    const std::size_t m = stack.size();
    if (m == 1) return BigInt(-1);
    Rational total(0);
    std::vector<Rational> rem;
    rem.reserve(m);
    for (std::int64_t v : stack) rem.emplace_back(v);
    total = h_hat_value(rem);
    if (!total.is_integer())
        throw std::logic_error("h_hat of an integer cyclic GAS must be an integer");
    return total.num();
}

/// Direct window-sum h_hat for an integer cyclic generalized arithmetic
/// sequence, asserting exact divisibility throughout.
inline BigInt h_hat_cyclic_direct(const std::vector<std::int64_t>& a) {
    if (a.empty()) throw GasError("empty sequence", 0);
    const std::size_t n = a.size();
    BigInt sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t prev = a[(i + n - 1) % n];
        const std::int64_t next = a[(i + 1) % n];
        const std::int64_t num = checked_add(prev, next);
        if (a[i] <= 0 || num % a[i] != 0) throw GasError("divisibility fails", i);
        sum += num / a[i] - 3;
    }
    return sum;
}

/// Negative continued fraction digits from regular continued fraction digits
/// via the classical correspondence
///   [a0; a1, a2, a3, ...] = [a0+1; 2^(a1-1), a2+2, 2^(a3-1), a4+2, ...]_-
/// (2^(j) meaning j copies of 2), truncating naturally at the last partial
/// quotient: a trailing even-position digit contributes a_{2i}+1, a trailing
/// odd-position digit just its run of 2s.
inline std::vector<std::int64_t> negative_cf_from_cf(const std::vector<std::int64_t>& cf) {
    if (cf.empty()) throw std::domain_error("malformed cf: empty");
    if (cf[0] < 0) throw std::domain_error("malformed cf: a0 must be >= 0");
    for (std::size_t i = 1; i < cf.size(); ++i)
        if (cf[i] < 1) throw std::domain_error("malformed cf: partial quotients must be >= 1");

    if (cf.size() == 1) return {cf[0]};

    std::vector<std::int64_t> out;
    out.push_back(cf[0] + 1);
    for (std::size_t i = 1; i < cf.size(); i += 2) {
        for (std::int64_t j = 1; j < cf[i]; ++j) out.push_back(2);
        if (i + 1 < cf.size()) {
            const bool last = (i + 2 == cf.size());
            out.push_back(cf[i + 1] + (last ? 1 : 2));
        }
    }
    return out;
}

/// Convergents r_n/s_n of a negative continued fraction via
/// r_{n+2} = b_{n+2} r_{n+1} - r_n (same for s). Both digit sequences of a
/// valid input satisfy the generalized-arithmetic divisibility, which is
/// asserted whenever the terms are positive.
inline std::vector<std::pair<BigInt, BigInt>> negative_cf_convergents(
    const std::vector<std::int64_t>& ncf) {
    if (ncf.empty()) throw std::domain_error("malformed negative cf: empty");
    for (std::size_t i = 1; i < ncf.size(); ++i)
        if (ncf[i] < 2) throw std::domain_error("negative cf digits must be >= 2 after b0");

    std::vector<std::pair<BigInt, BigInt>> conv;
    conv.reserve(ncf.size());
    conv.emplace_back(BigInt(ncf[0]), BigInt(1));
    if (ncf.size() > 1) conv.emplace_back(BigInt(ncf[0]) * ncf[1] - 1, BigInt(ncf[1]));
    for (std::size_t i = 2; i < ncf.size(); ++i) {
        conv.emplace_back(BigInt(ncf[i]) * conv[i - 1].first - conv[i - 2].first,
                          BigInt(ncf[i]) * conv[i - 1].second - conv[i - 2].second);
    }

    if (conv.size() >= 3) {
        auto check = [&](auto proj, const char* what) {
            std::vector<Rational> terms;
            terms.reserve(conv.size());
            for (const auto& c : conv) {
                const BigInt& v = proj(c);
                if (v <= 0) return;  // r-side can dip nonpositive for b0 <= 0
                terms.emplace_back(v, BigInt(1));
            }
            try {
                validate_gas(std::move(terms), false);
            } catch (const GasError& e) {
                throw std::logic_error(std::string(what) +
                                       " convergents failed GAS validation: " + e.what());
            }
        };
        check([](const auto& c) -> const BigInt& { return c.first; }, "numerator");
        check([](const auto& c) -> const BigInt& { return c.second; }, "denominator");
    }
    return conv;
}

}  // namespace bcz
