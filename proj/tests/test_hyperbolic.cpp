#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hyperbolic.hpp"

using namespace epsteinlab;

namespace {

MoebiusMap random_moebius(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
        const cplx c(u(rng), u(rng)), d(u(rng), u(rng));
        if (std::abs(a * d - b * c) > 0.1)
            return MoebiusMap(a, b, c, d);
    }
}

H3Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> h(0.1, 3.0);
    return H3Point(cplx(u(rng), u(rng)), h(rng));
}

cplx cross_ratio(cplx a, cplx b, cplx c, cplx d) {
    return (a - c) * (b - d) / ((a - d) * (b - c));
}

} // namespace

TEST_CASE("points validate their height") {
    CHECK_THROWS_AS(H3Point(cplx(0.0), 0.0), BadArgument);
    CHECK_THROWS_AS(H3Point(cplx(0.0), -1.0), BadArgument);
    CHECK_NOTHROW(H3Point(cplx(1.0, 2.0), 0.5));
}

TEST_CASE("moebius maps normalize to unit determinant and reject singular input") {
    const MoebiusMap m(2.0, 0.0, 0.0, 2.0); // scalar matrix, same map as identity
    CHECK(std::abs(m.a() * m.d() - m.b() * m.c() - 1.0) < 1e-14);
    CHECK(std::abs(m.apply(cplx(0.7, -0.3)) - cplx(0.7, -0.3)) < 1e-14);
    CHECK_THROWS_AS(MoebiusMap(1.0, 2.0, 2.0, 4.0), BadArgument);
}

TEST_CASE("boundary action handles pole and infinity") {
    const MoebiusMap inv(0.0, 1.0, 1.0, 0.0); // z -> 1/z
    CHECK(inv.apply(BoundaryPoint(cplx(0.0))).infinite);
    CHECK(!inv.apply(BoundaryPoint::infinity()).infinite);
    CHECK(std::abs(inv.apply(BoundaryPoint::infinity()).w) < 1e-14);
    CHECK_THROWS_AS(inv.apply(cplx(0.0)), DomainError);

    const MoebiusMap aff(1.0, 5.0, 0.0, 1.0); // z -> z + 5
    CHECK(aff.apply(BoundaryPoint::infinity()).infinite);
}

TEST_CASE("doubling map lifts (0,1) to (0,2)") {
    const MoebiusMap dbl(2.0, 0.0, 0.0, 1.0);
    const H3Point x = poincare_extend(dbl, H3Point(cplx(0.0), 1.0));
    CHECK(std::abs(x.w) < 1e-15);
    CHECK(x.t == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(hyp_distance(H3Point(cplx(0.0), 1.0), x) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("inversion lifts by the closed form") {
    // z -> -1/z sends (w, t) to (conj(w), t)/(|w|^2 + t^2) up to sign in w.
    const MoebiusMap neg_inv(0.0, -1.0, 1.0, 0.0);
    const H3Point x = poincare_extend(neg_inv, H3Point(cplx(1.0, 0.0), 1.0));
    CHECK(std::abs(x.w - cplx(-0.5, 0.0)) < 1e-14);
    CHECK(x.t == doctest::Approx(0.5).epsilon(1e-14));

    // j = (0, 1) is fixed by the lift.
    const H3Point j = poincare_extend(neg_inv, H3Point(cplx(0.0), 1.0));
    CHECK(std::abs(j.w) < 1e-15);
    CHECK(j.t == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cross ratio is a moebius invariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const MoebiusMap m = random_moebius(rng);
        cplx z[4];
        bool ok = true;
        for (auto& v : z) {
            v = cplx(u(rng), u(rng));
            if (std::abs(m.c() * v + m.d()) < 0.05)
                ok = false;
        }
        if (!ok || std::abs((z[0] - z[3]) * (z[1] - z[2])) < 0.05)
            continue;
        const cplx before = cross_ratio(z[0], z[1], z[2], z[3]);
        const cplx after = cross_ratio(m.apply(z[0]), m.apply(z[1]),
                                       m.apply(z[2]), m.apply(z[3]));
        CHECK(std::abs(before - after) < 1e-12 * (1.0 + std::abs(before)));
    }
}

TEST_CASE("lifted maps are isometries") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 100; ++k) {
        const MoebiusMap m = random_moebius(rng);
        const H3Point x = random_point(rng);
        const H3Point y = random_point(rng);
        const double before = hyp_distance(x, y);
        const double after = hyp_distance(poincare_extend(m, x), poincare_extend(m, y));
        CHECK(std::abs(before - after) < 1e-10 * (1.0 + before));
    }
}

TEST_CASE("composition of lifts matches lift of composition") {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 50; ++k) {
        const MoebiusMap f = random_moebius(rng);
        const MoebiusMap g = random_moebius(rng);
        const H3Point x = random_point(rng);
        const H3Point lhs = poincare_extend(compose(f, g), x);
        const H3Point rhs = poincare_extend(f, poincare_extend(g, x));
        CHECK(std::abs(lhs.w - rhs.w) < 1e-11 * (1.0 + std::abs(rhs.w)));
        CHECK(std::abs(lhs.t - rhs.t) < 1e-11 * (1.0 + rhs.t));
    }
}

TEST_CASE("inverse lift undoes the lift") {
    std::mt19937_64 rng(14);
    for (int k = 0; k < 50; ++k) {
        const MoebiusMap m = random_moebius(rng);
        const H3Point x = random_point(rng);
        const H3Point y = poincare_extend(m.inverse(), poincare_extend(m, x));
        CHECK(std::abs(y.w - x.w) < 1e-11);
        CHECK(std::abs(y.t - x.t) < 1e-11);
    }
}

TEST_CASE("visual density of j is the round density") {
    const H3Point j(cplx(0.0), 1.0);
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 25; ++k) {
        const cplx xi(u(rng), u(rng));
        const double want = 2.0 / (1.0 + std::norm(xi));
        CHECK(visual_density(j, BoundaryPoint(xi)) ==
              doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(visual_density(j, BoundaryPoint::infinity()) ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("visual density transforms with the boundary derivative") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const MoebiusMap m = random_moebius(rng);
        const H3Point x = random_point(rng);
        const cplx xi(u(rng), u(rng));
        if (std::abs(m.c() * xi + m.d()) < 0.05)
            continue;
        const double lhs = visual_density(poincare_extend(m, x),
                                          BoundaryPoint(m.apply(xi))) *
                           std::abs(m.derivative(xi));
        const double rhs = visual_density(x, BoundaryPoint(xi));
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + rhs));
    }
}

TEST_CASE("visual metric has curvature +1") {
    // For the metric v_x |dxi| the Gauss curvature is -(lap log v)/v^2.
    const double h = 1e-3;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 10; ++k) {
        const H3Point x = random_point(rng);
        const cplx xi(u(rng), u(rng));
        auto lv = [&](cplx p) { return std::log(visual_density(x, BoundaryPoint(p))); };
        const double lap =
            (lv(xi + h) + lv(xi - h) + lv(xi + cplx(0, h)) + lv(xi - cplx(0, h)) -
             4.0 * lv(xi)) /
            (h * h);
        const double v = visual_density(x, BoundaryPoint(xi));
        CHECK(-lap / (v * v) == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("horosphere shape, witness, and residual agree") {
    const Horosphere h = horosphere_of_metric(cplx(0.3, -0.2), 0.5);
    CHECK(h.size == doctest::Approx(std::exp(0.5)).epsilon(1e-15));

    const SphereShape s = horosphere_shape(h);
    CHECK(s.radius == doctest::Approx(1.0 / h.size).epsilon(1e-15));
    CHECK(std::abs(s.center_w - h.base.w) < 1e-15);
    CHECK(s.center_t == doctest::Approx(s.radius).epsilon(1e-15));

    // Every point of the Euclidean sphere lies on the level set.
    for (int k = 0; k < 16; ++k) {
        const double phi = 0.1 + 0.18 * k; // skip the tangency point phi = pi
        const double ct = std::cos(phi), st = std::sin(phi);
        const H3Point p(s.center_w + s.radius * st * std::polar(1.0, 0.7 * k),
                        s.center_t + s.radius * ct);
        if (!(p.t > 1e-6))
            continue;
        CHECK(std::abs(horosphere_residual(h, p)) < 1e-12 * h.size);
    }

    const H3Point w = horosphere_witness(h);
    CHECK(std::abs(horosphere_residual(h, w)) < 1e-14 * h.size);
    CHECK(w.t == doctest::Approx(2.0 / h.size).epsilon(1e-15));
}

TEST_CASE("horosphere at infinity is a horizontal plane") {
    const Horosphere h(BoundaryPoint::infinity(), 3.0);
    const H3Point w = horosphere_witness(h);
    CHECK(w.t == doctest::Approx(1.5).epsilon(1e-15)); // plane t = size/2
    CHECK(std::abs(horosphere_residual(h, w)) < 1e-14);
    CHECK(std::abs(horosphere_residual(h, H3Point(cplx(5.0, -7.0), 1.5))) < 1e-14);
    CHECK_THROWS_AS(horosphere_shape(h), BadArgument);
}

TEST_CASE("isometries carry horospheres to horospheres") {
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        const MoebiusMap m = random_moebius(rng);
        const cplx base(u(rng), u(rng));
        const Horosphere h = horosphere_of_metric(base, u(rng));
        const Horosphere hm = mobius_apply(m, h);

        // Transport sphere points and test them against the image level set.
        const SphereShape s = horosphere_shape(h);
        for (int i = 1; i < 7; ++i) {
            const double phi = 0.4 * i;
            const H3Point p(s.center_w + s.radius * std::sin(phi),
                            s.center_t + s.radius * std::cos(phi));
            const H3Point q = poincare_extend(m, p);
            CHECK(std::abs(horosphere_residual(hm, q)) < 1e-9 * hm.size);
        }
    }
}

TEST_CASE("horosphere size transforms with the boundary derivative") {
    // v_{Mx}(M base) = v_x(base)/|M'(base)| fixes the image size.
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        const MoebiusMap m = random_moebius(rng);
        const cplx base(u(rng), u(rng));
        if (std::abs(m.c() * base + m.d()) < 0.05)
            continue;
        const Horosphere h(BoundaryPoint(base), 0.5 + std::abs(u(rng)));
        const Horosphere hm = mobius_apply(m, h);
        CHECK(!hm.base.infinite);
        CHECK(std::abs(hm.base.w - m.apply(base)) < 1e-12);
        CHECK(hm.size == doctest::Approx(h.size / std::abs(m.derivative(base)))
                             .epsilon(1e-10));
    }
}

TEST_CASE("distance formula matches a geodesic integral on a vertical line") {
    // Along a vertical ray the distance is log(t2/t1).
    const H3Point a(cplx(2.0, -1.0), 0.3);
    const H3Point b(cplx(2.0, -1.0), 1.7);
    CHECK(hyp_distance(a, b) ==
          doctest::Approx(std::log(1.7 / 0.3)).epsilon(1e-14));
    CHECK(hyp_distance(b, a) == doctest::Approx(hyp_distance(a, b)).epsilon(1e-15));
}
