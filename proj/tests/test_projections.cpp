#include <cmath>
#include <random>

#include "doctest.h"
#include "ellipara/projections.hpp"

using namespace ellipara;

TEST_SUITE("projections") {

TEST_CASE("stereographic pole images") {
    CHECK(approx_equal(stereographic({0, 0, -1}, Pole::North), ComplexPoint(0, 0), 1e-15));
    CHECK(approx_equal(stereographic({1, 0, 0}, Pole::North), ComplexPoint(1, 0), 1e-15));
    CHECK(stereographic({0, 0, 1}, Pole::North).infinite);
    CHECK(stereographic({0, 0, -1}, Pole::South).infinite);
    CHECK(approx_equal(stereographic({0, 0, 1}, Pole::South), ComplexPoint(0, 0), 1e-15));
}

TEST_CASE("inv_stereographic special points and round-trip") {
    auto close = [](const Vec3& a, const Vec3& b) { return norm(a - b) <= 1e-12; };
    CHECK(close(inv_stereographic(ComplexPoint(0, 0), Pole::North), {0, 0, -1}));
    CHECK(close(inv_stereographic(ComplexPoint::infinity(), Pole::North), {0, 0, 1}));
    CHECK(close(inv_stereographic(ComplexPoint(1, 0), Pole::North), {1, 0, 0}));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const ComplexPoint z(u(rng), u(rng));
        for (Pole pole : {Pole::North, Pole::South}) {
            const Vec3 p = inv_stereographic(z, pole);
            CHECK(std::abs(norm(p) - 1.0) <= 1e-12);
            CHECK(approx_equal(stereographic(p, pole), z, 1e-12));
        }
    }
}

TEST_CASE("pole_swap: z/|z|^2, involution") {
    CHECK(approx_equal(pole_swap(ComplexPoint(2, 0)), ComplexPoint(0.5, 0), 1e-15));
    CHECK(approx_equal(pole_swap(ComplexPoint(1, 0)), ComplexPoint(1, 0), 1e-15));
    CHECK(pole_swap(ComplexPoint(0, 0)).infinite);
    CHECK(approx_equal(pole_swap(ComplexPoint::infinity()), ComplexPoint(0, 0), 1e-15));
    const ComplexPoint z(0.3, -1.7);
    CHECK(approx_equal(pole_swap(pole_swap(z)), z, 1e-14));
}

TEST_CASE("mobius_align: z0 -> 0, z1 -> inf, z2 -> positive real") {
    const cplx z0(0.2, 0.4), z1(-1.0, 0.3), z2(1.5, -0.8);
    const MobiusAlignment m(z0, z1, z2);
    CHECK(approx_equal(mobius_align(ComplexPoint(z0), m), ComplexPoint(0, 0), 1e-14));
    CHECK(mobius_align(ComplexPoint(z1), m).infinite);
    const auto g2 = mobius_align(ComplexPoint(z2), m);
    REQUIRE(g2.is_finite());
    CHECK(std::abs(std::arg(g2.value)) <= 1e-12);
    CHECK(std::abs(g2.value) > 0.0);
}

TEST_CASE("mobius_align preserves cross-ratios") {
    const MobiusAlignment m(cplx(0.1, 0.2), cplx(2.0, -1.0), cplx(-0.5, 0.7));
    const cplx w[4] = {{0.4, 0.9}, {-1.2, 0.1}, {0.8, -0.6}, {1.9, 1.1}};
    auto cross = [](cplx a, cplx b, cplx c, cplx d) {
        return ((a - c) * (b - d)) / ((a - d) * (b - c));
    };
    cplx img[4];
    for (int i = 0; i < 4; ++i) {
        const auto g = mobius_align(ComplexPoint(w[i]), m);
        REQUIRE(g.is_finite());
        img[i] = g.value;
    }
    const cplx before = cross(w[0], w[1], w[2], w[3]);
    const cplx after = cross(img[0], img[1], img[2], img[3]);
    CHECK(std::abs(before - after) <= 1e-10 * std::abs(before));
}

TEST_CASE("ellip_stereographic axis images") {
    const EllipsoidRadii r(2.0, 1.0, 3.0);
    CHECK(approx_equal(ellip_stereographic({0, 0, -3}, r, Pole::North), ComplexPoint(0, 0), 1e-14));
    CHECK(approx_equal(ellip_stereographic({2, 0, 0}, r, Pole::North), ComplexPoint(1, 0), 1e-14));
    CHECK(approx_equal(ellip_stereographic({0, 1, 0}, r, Pole::North), ComplexPoint(0, 1), 1e-14));
    CHECK(ellip_stereographic({0, 0, 3}, r, Pole::North).infinite);
}

TEST_CASE("ellipsoidal projection reduces to spherical at r=(1,1,1)") {
    const EllipsoidRadii r(1, 1, 1);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 25; ++i) {
        const ComplexPoint z(u(rng), u(rng));
        const Vec3 p = inv_stereographic(z, Pole::North);
        const auto a = stereographic(p, Pole::North);
        const auto b = ellip_stereographic(p, r, Pole::North);
        CHECK(approx_equal(a, b, 1e-12));
    }
}

TEST_CASE("inv_ellip_stereographic: on-surface, round-trip, oracle point") {
    const EllipsoidRadii r(2.0, 1.0, 3.0);
    auto close = [](const Vec3& a, const Vec3& b) { return norm(a - b) <= 1e-12; };
    CHECK(close(inv_ellip_stereographic(ComplexPoint(0, 0), r, Pole::North), {0, 0, -3}));
    CHECK(close(inv_ellip_stereographic(ComplexPoint::infinity(), r, Pole::North), {0, 0, 3}));
    CHECK(close(inv_ellip_stereographic(ComplexPoint(1, 0), r, Pole::North), {2, 0, 0}));

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const ComplexPoint z(u(rng), u(rng));
        for (Pole pole : {Pole::North, Pole::South}) {
            const Vec3 p = inv_ellip_stereographic(z, r, pole);
            CHECK(std::abs(r.residual(p)) <= 1e-12);
            CHECK(approx_equal(ellip_stereographic(p, r, pole), z, 1e-12));
        }
    }
}

TEST_CASE("mu_inv_ellip: sphere -> 0, origin oracle 1/3, c-independence at 0") {
    CHECK(std::abs(mu_inv_ellip(cplx(0.7, -1.3), EllipsoidRadii(2.5, 2.5, 2.5))) <= 1e-14);
    for (double c : {0.5, 1.0, 1.5, 4.0}) {
        const cplx mu = mu_inv_ellip(cplx(0, 0), EllipsoidRadii(2, 1, c));
        CHECK(std::abs(mu - cplx(1.0 / 3.0, 0.0)) <= 1e-12);
    }
    CHECK(std::abs(mu_inv_ellip(cplx(0, 0), EllipsoidRadii(1, 1, 5))) <= 1e-14);
}

TEST_CASE("mu_inv_ellip: |mu| < 1 and conjugation symmetry") {
    const EllipsoidRadii r(2.0, 1.0, 1.5);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const cplx z(u(rng), u(rng));
        const cplx m = mu_inv_ellip(z, r);
        CHECK(std::abs(m) < 1.0);
        CHECK(std::abs(mu_inv_ellip(std::conj(z), r) - std::conj(m)) <= 1e-12);
    }
}

TEST_CASE("face_mu_average arithmetic") {
    CHECK(std::abs(face_mu_average(0, 0, 0)) == doctest::Approx(0.0));
    CHECK(std::abs(face_mu_average(0.3, 0.3, 0.3) - cplx(0.3, 0)) <= 1e-15);
    const cplx avg = face_mu_average(cplx(0.1, 0), cplx(0.2, 0.3), cplx(0.0, 0.3));
    CHECK(std::abs(avg - cplx(0.1, 0.2)) <= 1e-15);
}

TEST_CASE("ellipsoid_area: sphere 4*pi and gradient oracles") {
    CHECK(ellipsoid_area(EllipsoidRadii(1, 1, 1)) == doctest::Approx(4 * M_PI).epsilon(1e-12));
    const auto g1 = ellipsoid_area_grad(EllipsoidRadii(1, 1, 1));
    CHECK(g1[0] == doctest::Approx(8 * M_PI / 3).epsilon(1e-10));
    CHECK(g1[1] == doctest::Approx(8 * M_PI / 3).epsilon(1e-10));
    CHECK(g1[2] == doctest::Approx(8 * M_PI / 3).epsilon(1e-10));

    // Central finite differences at an asymmetric triple.
    const EllipsoidRadii r(1.7, 0.9, 1.3);
    const auto g = ellipsoid_area_grad(r);
    const double h = 1e-6;
    const double fd[3] = {
        (ellipsoid_area({r.a + h, r.b, r.c}) - ellipsoid_area({r.a - h, r.b, r.c})) / (2 * h),
        (ellipsoid_area({r.a, r.b + h, r.c}) - ellipsoid_area({r.a, r.b - h, r.c})) / (2 * h),
        (ellipsoid_area({r.a, r.b, r.c + h}) - ellipsoid_area({r.a, r.b, r.c - h})) / (2 * h)};
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(g[k] - fd[k]) <= 1e-6 * std::abs(fd[k]));
}

TEST_CASE("invalid radii are rejected") {
    CHECK_THROWS_AS(EllipsoidRadii(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EllipsoidRadii(1.0, -2.0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
