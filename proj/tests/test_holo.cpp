#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "holo.hpp"

using namespace epsteinlab;

namespace {

// Finite-difference jet of an expression from values alone: central stencils
// with holomorphic steps along the real axis.
HoloJet3 fd_jet(const HoloExpr& e, cplx z, double h) {
    auto f = [&](cplx p) { return e.eval(p); };
    HoloJet3 j;
    j.f = f(z);
    j.df = (f(z + h) - f(z - h)) / (2.0 * h);
    j.d2f = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
    j.d3f = (-f(z - 2.0 * h) + 2.0 * f(z - h) - 2.0 * f(z + h) + f(z + 2.0 * h)) /
            (2.0 * h * h * h);
    return j;
}

void check_jet_close(const HoloJet3& got, const HoloJet3& want, double tol) {
    CHECK(std::abs(got.f - want.f) < tol * (1.0 + std::abs(want.f)));
    CHECK(std::abs(got.df - want.df) < tol * (1.0 + std::abs(want.df)));
    CHECK(std::abs(got.d2f - want.d2f) < tol * (1.0 + std::abs(want.d2f)));
    CHECK(std::abs(got.d3f - want.d3f) < tol * (1.0 + std::abs(want.d3f)));
}

} // namespace

TEST_CASE("koebe jet at the origin") {
    const HoloExpr k = expr_koebe();
    const HoloJet3 j = k.jet(cplx(0.0));
    CHECK(std::abs(j.f - cplx(0.0)) < 1e-15);
    CHECK(std::abs(j.df - cplx(1.0)) < 1e-15);
    CHECK(std::abs(j.d2f - cplx(4.0)) < 1e-15);
    CHECK(std::abs(j.d3f - cplx(18.0)) < 1e-15);
    CHECK_THROWS_AS(k.jet(cplx(1.0)), DomainError);
}

TEST_CASE("jets agree with finite differences of the values") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    const HoloExpr exprs[] = {
        expr_koebe(),
        expr_exp(),
        expr_affine(cplx(0.5, 1.0), cplx(0.0, -2.0)),
        expr_mobius(MoebiusMap(1.0, cplx(0.0, 1.0), cplx(0.3, 0.0), 1.0)),
        expr_power(3),
        expr_compose(expr_exp(), expr_power(2)),
        expr_sum(expr_koebe(), expr_power(2)),
        expr_product(expr_exp(), expr_affine(1.0, cplx(2.0, 0.0))),
        parse_expr("compose(log, affine(1, 3))"),
        parse_expr("rpow(0.5)"),
    };
    for (const HoloExpr& e : exprs) {
        for (int k = 0; k < 6; ++k) {
            cplx z(u(rng), u(rng));
            z += cplx(1.1, 0.0); // keep clear of cuts, poles, and 0
            if (e.root == exprs[0].root)
                z *= 0.3;
            const double h = 1e-3;
            check_jet_close(e.jet(z), fd_jet(e, z, h), 2e-4);
        }
    }
}

TEST_CASE("schwarzian vanishes exactly on fractional linear maps") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
        const cplx c(u(rng), u(rng)), d(u(rng), u(rng));
        if (std::abs(a * d - b * c) < 0.1)
            continue;
        const HoloExpr m = expr_mobius(MoebiusMap(a, b, c, d));
        const cplx z(u(rng), u(rng));
        if (std::abs(c * z + d) < 0.1)
            continue;
        CHECK(std::abs(schwarzian(m, z)) < 1e-12);
    }
}

TEST_CASE("koebe schwarzian has the closed form -6/(1-z^2)^2") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    const HoloExpr k = expr_koebe();
    for (int i = 0; i < 25; ++i) {
        const cplx z(u(rng), u(rng));
        const cplx want = -6.0 / std::pow(1.0 - z * z, 2);
        CHECK(std::abs(schwarzian(k, z) - want) < 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("schwarzian cocycle") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const HoloExpr outers[] = {
        expr_koebe(),
        expr_exp(),
        expr_mobius(MoebiusMap(2.0, cplx(0.0, 1.0), cplx(0.1, 0.0), 1.0)),
    };
    const HoloExpr inners[] = {
        expr_affine(cplx(0.4, 0.1), cplx(0.05, 0.0)),
        expr_mobius(MoebiusMap(1.0, 0.0, cplx(0.2, 0.0), 1.0)),
        expr_koebe(),
    };
    for (const HoloExpr& f : outers)
        for (const HoloExpr& g : inners)
            for (int i = 0; i < 5; ++i) {
                const cplx z(u(rng), u(rng));
                CHECK(schwarzian_compose_check(f, g, z) < 1e-10);
            }
}

TEST_CASE("parser grammar round trip") {
    const HoloExpr e = parse_expr(" compose( koebe , affine( 0.5 , 0 ) ) ");
    const HoloExpr want = expr_compose(expr_koebe(), expr_affine(0.5, 0.0));
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 10; ++i) {
        const cplx z(u(rng), u(rng));
        CHECK(std::abs(e.eval(z) - want.eval(z)) < 1e-15);
    }
    CHECK(e.declared_univalent); // compose of univalent pieces

    // Complex scalar literals in every form.
    const HoloExpr c = parse_expr("constant(1-2i)");
    CHECK(std::abs(c.eval(0.0) - cplx(1.0, -2.0)) < 1e-15);
    CHECK(std::abs(parse_expr("constant(i)").eval(0.0) - cplx(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(parse_expr("constant(-i)").eval(0.0) - cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(parse_expr("constant(3i)").eval(0.0) - cplx(0.0, 3.0)) < 1e-15);
    CHECK(std::abs(parse_expr("const(2)").eval(0.0) - cplx(2.0)) < 1e-15);

    // Aliases and n-ary folds.
    const HoloExpr s = parse_expr("sum(identity, power(2), constant(1))");
    CHECK(std::abs(s.eval(cplx(2.0)) - cplx(7.0)) < 1e-14);
    const HoloExpr p = parse_expr("product(id, id, id)");
    CHECK(std::abs(p.eval(cplx(2.0)) - cplx(8.0)) < 1e-14);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("nosuch"), ParseError);
    CHECK_THROWS_AS(parse_expr("koebe extra"), ParseError);
    CHECK_THROWS_AS(parse_expr("affine(1"), ParseError);
    CHECK_THROWS_AS(parse_expr("sum(identity)"), ParseError);
    CHECK_THROWS_AS(parse_expr("power(1.5)"), ParseError); // hint: rpow
    CHECK_THROWS_AS(parse_expr("mobius(1,0,0)"), ParseError);
    CHECK_THROWS_AS(parse_expr("constant()"), ParseError);
}

TEST_CASE("branch cuts and critical points are reported") {
    CHECK_THROWS_AS(parse_expr("log").jet(cplx(-1.0, 0.0)), DomainError);
    CHECK_THROWS_AS(parse_expr("rpow(0.5)").jet(cplx(-2.0, 0.0)), DomainError);
    CHECK_THROWS_AS(parse_expr("power(-1)").jet(cplx(0.0)), DomainError);
    CHECK_NOTHROW(parse_expr("power(2)").jet(cplx(0.0)));

    // Vanishing derivative: f(z) = z^2 at 0 has no finite schwarzian.
    CHECK_THROWS_AS(schwarzian(parse_expr("power(2)"), cplx(0.0)),
                    CriticalPointError);
    CHECK_THROWS_AS(schwarzian(parse_expr("constant(4)"), cplx(0.2, 0.1)),
                    CriticalPointError);
}

TEST_CASE("quadratic differential pullback obeys the cocycle") {
    // S(f.g) = pullback of S(f) along g, plus S(g).
    const HoloExpr f = expr_koebe();
    const HoloExpr g = expr_mobius(MoebiusMap(1.0, 0.0, cplx(0.3, 0.0), 1.0));
    auto phi = [&](cplx w) { return schwarzian(f, w); };
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 20; ++i) {
        const cplx z(u(rng), u(rng));
        const QuadDifferentialSample pulled = quad_pullback(phi, g, z);
        CHECK(std::abs(pulled.z - z) < 1e-15);
        const cplx want = schwarzian(expr_compose(f, g), z) - schwarzian(g, z);
        CHECK(std::abs(pulled.value - want) < 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("pointwise norm against the disk density") {
    CHECK(disk_density(cplx(0.0)) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(pointwise_norm(schwarzian(expr_koebe(), cplx(0.0)), disk_density(cplx(0.0))) ==
          doctest::Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS(pointwise_norm(cplx(1.0), 0.0), BadArgument);
    CHECK_THROWS_AS(disk_density(cplx(1.0, 0.1)), DomainError);
}

TEST_CASE("norm scan of the koebe map saturates the univalence bound") {
    GridSpec grid;
    grid.nr = 100;
    grid.ntheta = 100;
    grid.rmax = 0.99;
    const NehariScanResult scan = nehari_scan(expr_koebe(), grid);
    // On the real diameter the norm is exactly 3/2; nowhere is it larger.
    CHECK(scan.sup_norm == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(scan.within_bound);
}

TEST_CASE("norm scan of a moebius map is zero") {
    GridSpec grid;
    const NehariScanResult scan =
        nehari_scan(expr_mobius(MoebiusMap(1.0, cplx(0.0, 0.4), 0.0, 1.0)), grid);
    CHECK(scan.sup_norm < 1e-13);
    CHECK(scan.within_bound);
}

TEST_CASE("scan validates the grid") {
    GridSpec bad;
    bad.nr = 0;
    CHECK_THROWS_AS(nehari_scan(expr_koebe(), bad), BadArgument);
    GridSpec bad2;
    bad2.rmax = 1.0;
    CHECK_THROWS_AS(nehari_scan(expr_koebe(), bad2), BadArgument);
}

TEST_CASE("jet arithmetic building blocks") {
    const cplx z(0.3, -0.2);
    const HoloJet3 a = expr_koebe().jet(z);
    const HoloJet3 b = expr_exp().jet(z);

    const HoloJet3 s = jet_add(a, b);
    CHECK(std::abs(s.f - (a.f + b.f)) < 1e-15);
    CHECK(std::abs(s.d3f - (a.d3f + b.d3f)) < 1e-15);

    // Leibniz to third order against the product expression.
    const HoloJet3 p = jet_mul(a, b);
    const HoloJet3 pw = expr_product(expr_koebe(), expr_exp()).jet(z);
    CHECK(std::abs(p.d3f - pw.d3f) < 1e-13 * (1.0 + std::abs(pw.d3f)));

    // Faa di Bruno against the composed expression.
    const HoloJet3 inner = expr_affine(cplx(0.4, 0.0), cplx(0.1, 0.0)).jet(z);
    const HoloJet3 outer = expr_koebe().jet(inner.f);
    const HoloJet3 c = jet_compose(outer, inner);
    const HoloJet3 cw =
        expr_compose(expr_koebe(), expr_affine(cplx(0.4, 0.0), cplx(0.1, 0.0))).jet(z);
    CHECK(std::abs(c.d3f - cw.d3f) < 1e-13 * (1.0 + std::abs(cw.d3f)));
}
