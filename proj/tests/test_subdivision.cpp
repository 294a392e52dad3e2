#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlab/field.hpp"
#include "nlab/subdivision.hpp"

using namespace nlab;

TEST_CASE("partition_cube geometry and ordering") {
    CubeSpec unit;
    unit.min_corner = Point(0.0, 0.0);
    unit.side = 1.0;
    auto quads = partition_cube(unit, 2);
    REQUIRE(quads.size() == 4);
    CHECK(quads[0].min_corner[0] == doctest::Approx(0.0));
    CHECK(quads[0].min_corner[1] == doctest::Approx(0.0));
    CHECK(quads[1].min_corner[0] == doctest::Approx(0.5));
    CHECK(quads[1].min_corner[1] == doctest::Approx(0.0));
    CHECK(quads[2].min_corner[0] == doctest::Approx(0.0));
    CHECK(quads[2].min_corner[1] == doctest::Approx(0.5));
    CHECK(quads[3].min_corner[0] == doctest::Approx(0.5));
    CHECK(quads[3].min_corner[1] == doctest::Approx(0.5));
    for (const auto& q : quads) CHECK(q.side == doctest::Approx(0.5));

    CubeSpec cube3;
    cube3.min_corner = Point(0.0, 0.0, 0.0);
    cube3.side = 1.0;
    auto sub = partition_cube(cube3, 3);
    REQUIRE(sub.size() == 27);
    double vol = 0;
    for (const auto& q : sub) vol += std::pow(q.side, 3);
    CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));

    auto self = partition_cube(cube3, 1);
    REQUIRE(self.size() == 1);
    CHECK(self[0].side == doctest::Approx(1.0));

    CHECK_THROWS_AS(partition_cube(unit, 4000), BudgetError);
}

TEST_CASE("binomial tail exact values") {
    const BigRat half(1, 2);
    CHECK(binomial_tail_exact(half, 1, 1) == BigRat(1, 2));
    CHECK(binomial_tail_exact(half, 100, 5) ==
          BigRat(BigInt(4087976), BigInt(1) << 100));
    CHECK(binomial_tail_exact(half, 57, 0) == BigRat(0));
    CHECK(binomial_tail_exact(BigRat(1, 3), 4, 4) ==
          BigRat(1, 81) + BigRat(4 * 2, 81) + BigRat(6 * 4, 81) + BigRat(4 * 8, 81));
}

TEST_CASE("claim k0 search with exhaustive exact verification") {
    const BigRat half(1, 2);
    auto params = claim_k0_search(half, 0.5, 0.1, 200);
    CHECK(params.k0 >= 2);
    CHECK(params.k0 <= 200);
    // Oracle: exhaustive re-verification of every k in [k0, 200].
    for (int k = params.k0; k <= 200; ++k) {
        const int lmax = std::min(k, static_cast<int>(std::floor(0.1 * k / std::log(k))));
        BigRat rhs(1);
        const int e = static_cast<int>(std::ceil(k * 0.5));
        for (int i = 0; i < e; ++i) rhs *= half;
        for (int l = 0; l <= lmax; ++l) CHECK(binomial_tail_exact(half, k, l) <= rhs);
    }

    // Gate: sigma >= (epsilon/3) ln(1/p).
    CHECK_THROWS_AS(claim_k0_search(half, 0.5, 0.12, 100), PreconditionError);

    auto tight = claim_k0_search(half, 0.9, 0.01, 500);
    CHECK(tight.k0 <= 500);
}

TEST_CASE("iteration process: exact DP equals the binomial closed form") {
    for (const BigRat& p : {BigRat(1, 2), BigRat(1, 3), BigRat(3, 7)}) {
        for (int k : {1, 2, 5, 9, 12}) {
            auto proc = simulate_iteration_process(p, 0.25, 100.0, 1.0, k, 10, 7);
            BigRat total(0);
            for (const auto& o : proc.outcomes) total += o.exact_prob;
            CHECK(total == BigRat(1));
            for (int l = 0; l <= k; ++l) {
                CHECK(proc.exact_tail_ge(l) == BigRat(1) - binomial_tail_exact(p, k, l));
            }
        }
    }
    // Pinned instances.
    auto p1 = simulate_iteration_process(BigRat(1, 2), 0.25, 100.0, 1.0, 1, 10, 7);
    CHECK(p1.exact_tail_ge(1) == BigRat(1, 2));
    auto p10 = simulate_iteration_process(BigRat(1, 2), 0.25, 100.0, 1.0, 10, 10, 7);
    CHECK(p10.exact_tail_ge(3) == BigRat(968, 1024));
}

TEST_CASE("iteration process: floor saturation and Monte Carlo consistency") {
    auto sat = simulate_iteration_process(BigRat(1, 2), 0.5, 5.0, 10.0, 8, 100, 3);
    for (const auto& o : sat.outcomes) CHECK(o.final_value == doctest::Approx(10.0));

    const int trials = 100000;
    auto proc = simulate_iteration_process(BigRat(1, 2), 0.25, 100.0, 1.0, 10, trials, 12345);
    for (int l = 0; l <= 10; ++l) {
        const double exact = static_cast<double>(proc.exact_tail_ge(l));
        const double emp = proc.empirical_cdf_at(l);
        const double band = 3.0 * std::sqrt(std::max(exact * (1 - exact), 1e-8) / trials);
        CHECK(std::abs(emp - exact) <= band + 1e-12);
    }
}

TEST_CASE("census: constant field counts nothing") {
    auto one = make_harmonic_polynomial(2, {{0, 0, 1.0}}, 100.0);
    CubeSpec Q;
    Q.min_corner = Point(-0.5, -0.5);
    Q.side = 1.0;
    CensusParams params;
    params.cube_index.sup_resolution = 12;
    auto census = census_high_index(*one, Q, 3, 0.5, params);
    CHECK(census.indices.size() == 9);
    CHECK(census.count_above == 0);
    CHECK(census.parent_index == doctest::Approx(0.0));
}

TEST_CASE("census: concentration, domination, determinism") {
    auto u = make_homogeneous_harmonic(2, 10, 200.0);
    CubeSpec Q;
    Q.min_corner = Point(-0.5, -0.5);
    Q.side = 1.0;
    CensusParams params;
    params.cube_index.sup_resolution = 12;
    auto census = census_high_index(*u, Q, 8, std::nan(""), params);
    REQUIRE(census.indices.size() == 64);

    // Subcube indices never exceed the parent index.
    for (double v : census.indices) CHECK(v <= census.parent_index + 1e-12);
    // Threshold rule collapsed from NaN to max(N(Q)/(1+c), N0).
    CHECK(census.threshold ==
          doctest::Approx(std::max(census.parent_index / 1.25, params.N0)));
    // Index concentrates near the homogeneity point.
    CHECK(census.count_above < 16);

    // Count is stable under a denser candidate set (the census oracle).
    CensusParams dense = params;
    dense.cube_index.centers_per_side = 5;
    dense.cube_index.radii_count = 4;
    dense.cube_index.sup_resolution = 24;
    auto denser = census_high_index(*u, Q, 8, std::nan(""), dense);
    CHECK(denser.count_above == census.count_above);

    auto again = census_high_index(*u, Q, 8, std::nan(""), params);
    REQUIRE(again.indices.size() == census.indices.size());
    for (std::size_t i = 0; i < census.indices.size(); ++i)
        CHECK(again.indices[i] == census.indices[i]);  // byte-identical
    CHECK(again.parent_index == census.parent_index);
}

TEST_CASE("iterated census: constant field and threshold floor") {
    auto one = make_harmonic_polynomial(2, {{0, 0, 1.0}}, 400.0);
    CubeSpec Q;
    Q.min_corner = Point(-0.5, -0.5);
    Q.side = 1.0;
    CensusParams params;
    params.cube_index.sup_resolution = 8;
    auto levels = iterated_census(*one, Q, 2, 3, 0.1, 10.0, params);
    REQUIRE(levels.size() == 3);
    for (const auto& lc : levels) {
        CHECK(lc.census.count_above == 0);
        CHECK(lc.fraction == doctest::Approx(0.0));
        // N(Q) = 0 <= N0, so every level threshold collapses to N0.
        CHECK(lc.census.threshold == doctest::Approx(10.0));
    }
}

TEST_CASE("rational parsing round trip") {
    CHECK(parse_rational("1/2") == BigRat(1, 2));
    CHECK(parse_rational("-3/9") == BigRat(-1, 3));
    CHECK(parse_rational("7") == BigRat(7));
    CHECK(rational_str(BigRat(968, 1024)) == "121/128");
    CHECK_THROWS_AS(parse_rational("x/y"), PreconditionError);
    CHECK_THROWS_AS(parse_rational("1/0"), PreconditionError);
}
