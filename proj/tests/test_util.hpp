#pragma once

#include "bcz/gas.hpp"
#include "bcz/rational.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace bcz::testing {

/// Regular continued fraction digits of a positive rational (Euclid).
inline std::vector<std::int64_t> cf_of_rational(std::int64_t p, std::int64_t q) {
    std::vector<std::int64_t> out;
    while (q != 0) {
        out.push_back(p / q);
        const std::int64_t r = p % q;
        p = q;
        q = r;
    }
    return out;
}

/// Independent oracle: negative continued fraction by the ceiling algorithm,
/// x -> ceil(x), then recurse on 1/(ceil(x) - x).
inline std::vector<BigInt> ncf_by_ceiling(Rational x) {
    std::vector<BigInt> out;
    for (;;) {
        BigInt c = x.floor();
        if (!(Rational(c, BigInt(1)) == x)) ++c;
        out.push_back(c);
        const Rational rem = Rational(c, BigInt(1)) - x;
        if (rem.is_zero()) break;
        x = Rational(1) / rem;
    }
    return out;
}

inline Rational random_unit_rational(std::mt19937_64& rng, std::int64_t max_den) {
    std::uniform_int_distribution<std::int64_t> dd(1, max_den);
    const std::int64_t q = dd(rng);
    std::uniform_int_distribution<std::int64_t> nd(1, q);
    return Rational(nd(rng), q);
}

}  // namespace bcz::testing
