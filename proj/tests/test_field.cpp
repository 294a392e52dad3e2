#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlab/field.hpp"
#include "test_oracles.hpp"

using namespace nlab;
using namespace nlab::testing;

TEST_CASE("plane harmonic polynomial basics") {
    auto u = make_harmonic_polynomial(2, {{1, 1, 1.0}});
    CHECK(u->degree() == 1);
    CHECK(u->value(Point(0.7, -2.0)) == doctest::Approx(0.7).epsilon(1e-15));

    auto re_z2 = make_harmonic_polynomial(2, {{2, 2, 1.0}});
    CHECK(re_z2->value(Point(1.0, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));

    auto mixed = make_harmonic_polynomial(2, {{0, 0, 1.0}, {8, 8, 1.0}});
    CHECK(mixed->value(Point(0.0, 0.0)) == doctest::Approx(1.0));
    CHECK(mixed->degree() == 8);
}

TEST_CASE("solid harmonic basis matches closed forms") {
    // B_2^0 = (3z^2 - r^2)/2, B_2^1 = 3(x + iy)z, B_2^2 = (x + iy)^2.
    Point p(1.0, 2.0, 3.0);
    const double r2 = 14.0;
    CHECK(make_harmonic_polynomial(3, {{2, 0, 1.0}})->value(p) ==
          doctest::Approx((3 * 9 - r2) / 2).epsilon(1e-14));
    CHECK(make_harmonic_polynomial(3, {{2, 1, 1.0}})->value(p) ==
          doctest::Approx(9.0).epsilon(1e-14));
    CHECK(make_harmonic_polynomial(3, {{2, -1, 1.0}})->value(p) ==
          doctest::Approx(18.0).epsilon(1e-14));
    CHECK(make_harmonic_polynomial(3, {{2, 2, 1.0}})->value(p) ==
          doctest::Approx(1.0 - 4.0).epsilon(1e-14));

    // x1 x2 is the degree-2 solid harmonic Im B_2^2 / 2.
    auto xy = make_harmonic_polynomial(3, {{2, -2, 0.5}});
    CHECK(xy->value(Point(1.0, 1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(xy->value(Point(2.0, 3.0, 0.0)) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(xy->degree() == 2);
}

TEST_CASE("discrete Laplacian of harmonic polynomials is O(h^2) small") {
    auto check_harmonic = [](const OraclePtr& u, const std::vector<Point>& pts) {
        for (const Point& p : pts) {
            const double scale = local_scale(*u, p);
            for (double h : {1e-2, 1e-3, 1e-4}) {
                const double lap = std::abs(fd_laplacian(*u, p, h));
                CHECK(lap <= 100.0 * h * h * scale);
            }
        }
    };
    check_harmonic(make_harmonic_polynomial(2, {{8, 8, 1.0}}), random_points(2, 20, 1.0, 7));
    check_harmonic(make_random_harmonic(2, 12, 11), random_points(2, 20, 1.0, 8));
    check_harmonic(make_random_harmonic(3, 10, 13), random_points(3, 20, 1.0, 9));

    // The spec's pinned instance: Re z^8 at (0.3, 0.4) with h = 1e-3.
    auto rez8 = make_harmonic_polynomial(2, {{8, 8, 1.0}});
    const Point p(0.3, 0.4);
    const double lap = std::abs(fd_laplacian(*rez8, p, 1e-3));
    CHECK(lap < 1e-6 * local_scale(*rez8, p));
}

TEST_CASE("torus eigenfunction construction and values") {
    auto u = make_torus_eigenfunction(2, {{{5, 0}, 1.0, true}});
    CHECK(u->eigenvalue() == doctest::Approx(25.0));
    CHECK(u->value(Point(0.1, 0.0)) == doctest::Approx(std::sin(0.5)).epsilon(1e-15));

    auto v = make_torus_eigenfunction(2, {{{3, 4}, 1.0, true}});
    CHECK(v->eigenvalue() == doctest::Approx(25.0));
    CHECK(v->value(Point(M_PI / 6, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));

    auto w = make_torus_eigenfunction(3, {{{2, 2, 1}, 1.0, false}});
    CHECK(w->eigenvalue() == doctest::Approx(9.0));
    for (const Point& p : random_points(3, 100, 2.0, 21)) {
        const double resid = std::abs(fd_laplacian(*w, p, 1e-3) + 9.0 * w->value(p));
        CHECK(resid <= 100.0 * 1e-6 * 9.0);
    }

    CHECK_THROWS_AS(make_torus_eigenfunction(2, {{{1, 0}, 1.0, true}, {{1, 1}, 1.0, true}}),
                    PreconditionError);
    CHECK_THROWS_AS(make_torus_eigenfunction(2, {{{1, 0}, 0.0, true}}), PreconditionError);
    CHECK_THROWS_AS(make_torus_eigenfunction(2, {}), PreconditionError);
}

TEST_CASE("harmonic lift") {
    auto u = make_torus_eigenfunction(2, {{{1, 0}, 1.0, true}}, 16.0);
    auto h = lift(u);
    CHECK(h->dim() == 3);
    CHECK(h->value(Point(M_PI, 0.0, 7.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h->value(Point(M_PI / 2, 0.0, 1.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    // h(x,t) = u(x) exp(sqrt(lambda) t) to machine precision, 1000 points.
    auto u9 = make_torus_eigenfunction(2, {{{3, 0}, 1.0, true}, {{0, 3}, 1.0, true}}, 16.0);
    auto h9 = lift(u9);
    for (const Point& q : random_points(3, 1000, 3.0, 33)) {
        const double expect = u9->value(Point(q[0], q[1])) * std::exp(3.0 * q[2]);
        CHECK(h9->value(q) == doctest::Approx(expect).epsilon(1e-14));
    }
    // Discrete Laplacian of the lift vanishes to O(h^2).
    for (const Point& q : random_points(3, 50, 1.0, 34)) {
        const double scale = local_scale(*h9, q);
        const double lap = std::abs(fd_laplacian(*h9, q, 1e-3));
        CHECK(lap <= 100.0 * 1e-6 * scale * 9.0);
    }

    CHECK_THROWS_AS(lift(make_harmonic_polynomial(2, {{1, 1, 1.0}})), PreconditionError);
}

TEST_CASE("analytic gradients match finite differences") {
    auto grad_check = [](const OraclePtr& f, const std::vector<Point>& pts) {
        REQUIRE(f->has_gradient());
        for (const Point& p : pts) {
            Point g = f->gradient(p);
            for (int i = 0; i < f->dim(); ++i) {
                Point pp = p, pm = p;
                pp[i] += 1e-6;
                pm[i] -= 1e-6;
                const double fd = (f->value(pp) - f->value(pm)) / 2e-6;
                CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    };
    grad_check(make_random_harmonic(2, 9, 5), random_points(2, 10, 1.0, 41));
    grad_check(make_torus_eigenfunction(2, {{{3, 4}, 0.7, true}, {{5, 0}, -0.2, false}}),
               random_points(2, 10, 1.0, 42));
    grad_check(lift(make_torus_eigenfunction(2, {{{2, 1}, 1.3, true}}, 8.0)),
               random_points(3, 10, 1.0, 43));
}

TEST_CASE("evaluation is deterministic and domain-checked") {
    auto f = make_random_harmonic(3, 8, 99);
    const Point p(0.3, -0.2, 0.9);
    const double v1 = f->value(p), v2 = f->value(p);
    CHECK(v1 == v2);

    CHECK_THROWS_AS(f->value(Point(5.0, 0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(make_harmonic_polynomial(4, {{1, 1, 1.0}}), PreconditionError);
    CHECK_THROWS_AS(make_harmonic_polynomial(2, {}), PreconditionError);
}

TEST_CASE("field JSON round trip") {
    std::vector<OraclePtr> fields = {
        make_random_harmonic(2, 7, 17),
        make_random_harmonic(3, 5, 18),
        make_torus_eigenfunction(2, {{{3, 4}, 1.0, true}, {{5, 0}, -2.0, false}}),
        lift(make_torus_eigenfunction(2, {{{2, 2}, 0.5, true}}, 8.0)),
    };
    for (const auto& f : fields) {
        auto g = FieldOracle::from_json(f->to_json());
        CHECK(g->dim() == f->dim());
        CHECK(g->kind() == f->kind());
        for (const Point& p : random_points(f->dim(), 25, 1.0, 55)) {
            CHECK(g->value(p) == f->value(p));  // bit-identical
        }
    }
    CHECK_THROWS_AS(FieldOracle::from_json(nlohmann::json{{"kind", "mystery"}}),
                    PreconditionError);
    CHECK_THROWS_AS(FieldOracle::from_json(nlohmann::json{
                        {"kind", "harmonic-polynomial"}, {"dim", 2}, {"bogus", 1},
                        {"coefficients", nlohmann::json::array()}}),
                    PreconditionError);
}
