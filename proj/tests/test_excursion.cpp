#include "bcz/excursion.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <numeric>
#include <random>

using namespace bcz;

namespace {

ModuliPoint mp(std::int64_t pa, std::int64_t qa, std::int64_t pb, std::int64_t qb) {
    return ModuliPoint(Rational(pa, qa), Rational(pb, qb));
}

}  // namespace

TEST_CASE("build_excursion hand examples") {
    const Excursion unit = build_excursion(mp(1, 1, 1, 1));
    CHECK(unit.length() == 1);
    CHECK(unit.start == FareyPoint(1, 1, 1));
    CHECK(unit.summary.zeta_s == HalfInteger::from_integer(-1));

    const Excursion half = build_excursion(mp(1, 2, 1, 2));
    REQUIRE(half.length() == 2);
    REQUIRE(half.points.size() == 3);
    CHECK(half.points[0] == FareyPoint(1, 2, 2));
    CHECK(half.points[1] == FareyPoint(2, 1, 2));
    CHECK(half.points[2] == FareyPoint(1, 2, 2));
    // interior a_1 = 1 = 1*(1/2) + 1*(1/2)
    CHECK(half.points[1].x() == Rational(1));

    // (1/n, 1/n) is the full periodic orbit of (1/n, 1).
    for (std::int64_t n : {2, 3, 5, 8, 13}) {
        const Excursion diag = build_excursion(mp(1, n, 1, n));
        CHECK(diag.length() == farey_length(n).a_n);
        CHECK(diag.start == FareyPoint(1, n, n));
        CHECK(diag.summary.zeta_s == HalfInteger::from_integer(-1));
    }

    CHECK_THROWS_AS(ModuliPoint(Rational(0), Rational(1)), std::domain_error);
    CHECK_THROWS_AS(ModuliPoint(Rational(3, 2), Rational(1)), std::domain_error);
}

TEST_CASE("primitive points: oracle examples and the correspondence") {
    CHECK(primitive_points(mp(1, 2, 1, 2)) ==
          std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 1}});
    CHECK(primitive_points(mp(1, 3, 1, 3)) ==
          std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 1}, {1, 1}, {1, 2}});
    CHECK(primitive_points(mp(1, 1, 1, 1)).empty());

    // Interior x-coordinates in orbit order equal u_i a + v_i b in v/u order,
    // exhaustively over denominators <= 25.
    std::vector<Rational> fracs;
    for (std::int64_t q = 1; q <= 25; ++q)
        for (std::int64_t p = 1; p <= q; ++p)
            if (std::gcd(p, q) == 1) fracs.emplace_back(p, q);
    for (const auto& a : fracs) {
        for (const auto& b : fracs) {
            const ModuliPoint m(a, b);
            const auto pairs = primitive_points(m);
            const Excursion e = build_excursion(m, BuildOptions{true, 1'000'000});
            REQUIRE(static_cast<std::size_t>(e.length()) == pairs.size() + 1);
            const Rational bound = Rational(1) / (a * b);
            REQUIRE(Rational(e.length()) <= bound);
            if (Rational(e.length()) == bound)
                REQUIRE((a == Rational(1) && b == Rational(1)));
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const Rational expect =
                    Rational(pairs[i].first) * a + Rational(pairs[i].second) * b;
                REQUIRE(e.points[i + 1].x() == expect);
                // depth: interior exceeds both endpoints
                REQUIRE(expect > a);
                REQUIRE(expect > b);
            }
        }
    }
}

TEST_CASE("excursion length estimate") {
    const auto unit = excursion_length_estimate(mp(1, 1, 1, 1));
    CHECK(unit.s == 1);

    const auto half = excursion_length_estimate(mp(1, 2, 1, 2));
    CHECK(half.s == 2);

    // Along the diagonal the ratio tends to 1 (Walfisz).
    const auto big = excursion_length_estimate(mp(1, 150, 1, 150));
    CHECK(big.s == farey_length(150).a_n);
    CHECK(std::fabs(big.ratio - 1.0) < 0.01);
}

TEST_CASE("reverse excursion") {
    // Palindromic case: (1/2, 1/2) reverses to itself.
    const Excursion half = build_excursion(mp(1, 2, 1, 2));
    const Excursion halfrev = reverse_excursion(half);
    REQUIRE(halfrev.length() == half.length());
    for (std::size_t i = 0; i < half.points.size(); ++i)
        CHECK(halfrev.points[i] == half.points[i]);

    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 1000; ++trial) {
        const Rational a = bcz::testing::random_unit_rational(rng, 100);
        const Rational b = bcz::testing::random_unit_rational(rng, 100);
        const Excursion e = build_excursion(ModuliPoint(a, b));
        const Excursion rev = reverse_excursion(e);
        REQUIRE(rev.moduli.a == b);
        REQUIRE(rev.moduli.b == a);
        REQUIRE(rev.length() == e.length());
        // Point-level reversal: rev point m is e point s-1-m with coordinates
        // swapped, for m in [0, s-1].
        const std::size_t s = static_cast<std::size_t>(e.length());
        for (std::size_t m = 0; m < s; ++m)
            REQUIRE(rev.points[m] == e.points[s - 1 - m].swapped());
        // Involution.
        const Excursion back = reverse_excursion(rev);
        for (std::size_t m = 0; m < e.points.size(); ++m)
            REQUIRE(back.points[m] == e.points[m]);
    }
}

TEST_CASE("reset control on hand examples") {
    const auto unit = reset_sum_check(build_excursion(mp(1, 1, 1, 1)));
    CHECK(unit.value == Rational(-1));
    CHECK(unit.lower == Rational(-2));
    CHECK(unit.upper == Rational(0));

    const auto half = reset_sum_check(build_excursion(mp(1, 2, 1, 2)));
    CHECK(half.value == Rational(-1));

    for (std::int64_t n : {2, 5, 9}) {
        const auto diag = reset_sum_check(build_excursion(mp(1, n, 1, n)));
        CHECK(diag.value == Rational(-1));
        CHECK(diag.lower == Rational(-2));
        CHECK(diag.upper == Rational(0));
    }
}

TEST_CASE("theta reset terms") {
    CHECK(theta_reset_at_r_i(3, 1) == Rational(-1));
    CHECK(theta_reset_at_r_i(3, 3) == Rational(1, 2));
    // n=5, i=2: value frozen by the orbit oracle; window (-3/2, 1/2).
    CHECK(theta_reset_at_r_i(5, 2) == Rational(-1, 2));
    CHECK_THROWS_AS(theta_reset_at_r_i(5, 6), std::domain_error);
    CHECK_THROWS_AS(theta_reset_at_r_i(5, 0), std::domain_error);

    for (std::int64_t n : {10, 23, 57})
        for (std::int64_t i = 1; i <= n; ++i) CHECK_NOTHROW(theta_reset_at_r_i(n, i));
}

TEST_CASE("overall monotonicity") {
    const Excursion e3 = build_excursion(mp(1, 3, 1, 3));
    REQUIRE(e3.length() == 4);
    CHECK(e3.zeta[0].to_rational() == Rational(1, 2));
    CHECK(e3.zeta[1].to_rational() == Rational(-1, 2));
    CHECK(e3.zeta[2].to_rational() == Rational(-3, 2));
    CHECK(e3.zeta[3].to_rational() == Rational(-1));
    CHECK(monotonicity_check(e3));

    CHECK_THROWS_AS(monotonicity_check(build_excursion(mp(1, 2, 1, 2))), std::domain_error);

    // Exhaustive desk sweep: denominators <= 40, s >= 4.
    std::vector<Rational> fracs;
    for (std::int64_t q = 1; q <= 40; ++q)
        for (std::int64_t p = 1; p <= q; ++p)
            if (std::gcd(p, q) == 1) fracs.emplace_back(p, q);
    std::int64_t checked = 0;
    for (const auto& a : fracs) {
        for (const auto& b : fracs) {
            const ModuliPoint m(a, b);
            const auto summary = excursion_summary(m);
            reset_check_summary(m, summary);
            if (summary.length >= 4) {
                REQUIRE(monotonicity_check_summary(m, summary));
                ++checked;
            }
        }
    }
    CHECK(checked > 50000);
}

TEST_CASE("energy hand examples") {
    const TriangleFunction khat3 = [](const FareyPoint& p) {
        return p.k_hat().to_rational() - Rational(3);
    };
    CHECK(energy(khat3, mp(1, 3, 1, 3)) == Rational(7, 2));
    CHECK(energy(khat3, mp(1, 1, 1, 1)) == Rational(1));
    CHECK(energy_khat(mp(1, 3, 1, 3)) == Rational(7, 2));
    CHECK(energy_khat(mp(1, 2, 1, 2)) == Rational(3, 2));
    CHECK(energy_khat(mp(1, 5, 1, 5)) == Rational(27, 2));

    // E >= 0, zero iff all partial sums vanish.
    const TriangleFunction zero = [](const FareyPoint&) { return Rational(0); };
    CHECK(energy(zero, mp(1, 3, 1, 3)).is_zero());
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const ModuliPoint m(bcz::testing::random_unit_rational(rng, 30),
                            bcz::testing::random_unit_rational(rng, 30));
        CHECK(energy_khat(m) >= Rational(0));
    }

    // Diagonal energy equals the theta abs-sum (periodic orbit identity).
    for (std::int64_t n : {2, 3, 7, 20})
        CHECK(energy_khat(mp(1, n, 1, n)) == theta_abs_sum(n));
}

TEST_CASE("energy bound checks") {
    const auto half = energy_bound_checks(mp(1, 2, 1, 2), Rational(2));
    CHECK(half.d_bound_checked);
    CHECK(half.energy_value == Rational(3, 2));
    CHECK(half.d_bound == Rational(64));

    const auto five = energy_bound_checks(mp(1, 5, 1, 5), Rational(5));
    CHECK(five.d_bound_checked);
    CHECK(five.energy_value == Rational(27, 2));
    CHECK(five.d_bound == Rational(6250));

    const auto ten = energy_bound_checks(mp(1, 10, 1, 10), Rational(10));
    CHECK(ten.d_bound_checked);
    CHECK(ten.slope_bound_checked);  // min = 1/10 < sqrt(5)-2, diagonal is golden

    // d too small for the rectangle bound: no d-check, still no violation.
    const auto skip = energy_bound_checks(mp(1, 10, 1, 10), Rational(3));
    CHECK_FALSE(skip.d_bound_checked);

    // Exhaustive: all moduli with denominators <= 20, d = 20.
    for (std::int64_t qa = 1; qa <= 20; ++qa)
        for (std::int64_t qb = 1; qb <= 20; ++qb)
            for (std::int64_t pa = 1; pa <= qa; ++pa)
                for (std::int64_t pb = 1; pb <= qb; ++pb) {
                    if (std::gcd(pa, qa) != 1 || std::gcd(pb, qb) != 1) continue;
                    CHECK_NOTHROW(
                        energy_bound_checks(mp(pa, qa, pb, qb), Rational(20)));
                }
}

TEST_CASE("sub-excursions") {
    const Excursion e3 = build_excursion(mp(1, 3, 1, 3));
    // x-coordinates: 1/3, 1, 2/3, 1, 1/3. Valid delimiters: (0,2), (2,4), (0,4).
    CHECK(is_sub_excursion(e3, 0, 2));
    CHECK(is_sub_excursion(e3, 2, 4));
    CHECK(is_sub_excursion(e3, 0, 4));
    CHECK_FALSE(is_sub_excursion(e3, 1, 3));  // interior 2/3 below endpoints 1, 1

    CHECK(sub_excursion_inequality_check(e3, 0, 2));
    CHECK(sub_excursion_inequality_check(e3, 2, 4));
    // Full excursion as its own sub-excursion: E <= s*0 + E.
    CHECK(sub_excursion_inequality_check(e3, 0, 4));
    CHECK_THROWS_AS(sub_excursion_inequality_check(e3, 1, 3), std::domain_error);

    // Sub-excursion energy equals a fresh build at the endpoint moduli.
    const Rational sub02 = sub_excursion_energy(e3, 0, 2);
    CHECK(sub02 == energy_khat(mp(1, 3, 2, 3)));

    // Randomized sweep with exhaustive delimiter detection.
    std::mt19937_64 rng(85);
    std::int64_t pairs_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const ModuliPoint m(bcz::testing::random_unit_rational(rng, 25),
                            bcz::testing::random_unit_rational(rng, 25));
        const Excursion e = build_excursion(m);
        const std::int64_t s = e.length();
        if (s > 60) continue;
        for (std::int64_t i1 = 0; i1 < s; ++i1) {
            for (std::int64_t i2 = i1 + 1; i2 <= s; ++i2) {
                if (!is_sub_excursion(e, i1, i2)) continue;
                REQUIRE(sub_excursion_inequality_check(e, i1, i2));
                // Cross-check against the unique excursion of the endpoints.
                const ModuliPoint sub(e.points[static_cast<std::size_t>(i1)].x(),
                                      e.points[static_cast<std::size_t>(i2)].x());
                REQUIRE(sub_excursion_energy(e, i1, i2) == energy_khat(sub));
                ++pairs_checked;
            }
        }
    }
    CHECK(pairs_checked > 1000);
}

TEST_CASE("reversal energy identity from the induction step") {
    // For t_1 the orbit index of a+b: sum_{m=t_1+1}^{s-1} |zeta_s - zeta_m|
    // <= E(b, a+b), desk scale.
    std::mt19937_64 rng(3003);
    int exercised = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Rational a = bcz::testing::random_unit_rational(rng, 20);
        const Rational b = bcz::testing::random_unit_rational(rng, 20);
        if (a + b > Rational(1)) continue;
        const ModuliPoint m(a, b);
        const Excursion e = build_excursion(m);
        const std::int64_t s = e.length();
        if (s < 3) continue;
        std::int64_t t1 = -1;
        for (std::int64_t i = 1; i < s; ++i)
            if (e.points[static_cast<std::size_t>(i)].x() == a + b) t1 = i;
        REQUIRE(t1 >= 1);  // (1,1) is always a primitive pair here
        Rational lhs(0);
        for (std::int64_t mdx = t1 + 1; mdx <= s - 1; ++mdx)
            lhs += (e.summary.zeta_s - e.zeta[static_cast<std::size_t>(mdx) - 1])
                       .abs()
                       .to_rational();
        const Rational rhs = energy_khat(ModuliPoint(b, a + b));
        REQUIRE(lhs <= rhs);
        ++exercised;
    }
    CHECK(exercised > 30);
}

TEST_CASE("random large-denominator sweep keeps every excursion invariant") {
    std::mt19937_64 rng(20260810);
    std::uniform_int_distribution<std::int64_t> dd(1, 10000);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t qa = dd(rng), qb = dd(rng);
        std::uniform_int_distribution<std::int64_t> pa(1, qa), pb(1, qb);
        const ModuliPoint m(Rational(pa(rng), qa), Rational(pb(rng), qb));
        const auto summary = excursion_summary(m, true);
        CHECK_NOTHROW(reset_check_summary(m, summary));
        if (summary.length >= 4) CHECK(monotonicity_check_summary(m, summary));
    }
}
