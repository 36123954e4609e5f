#include <cmath>
#include <random>

#include "doctest.h"
#include "ellipara/beltrami.hpp"
#include "ellipara/projections.hpp"
#include "support/meshes.hpp"

using namespace ellipara;
namespace tm = ellipara::testing;

namespace {

PlanarEmbedding apply_linear(const PlanarEmbedding& domain, cplx A, cplx B, cplx C) {
    PlanarEmbedding out = domain;
    for (auto& z : out.pos) z = A * z + B * std::conj(z) + C;
    return out;
}

}  // namespace

TEST_SUITE("beltrami") {

TEST_CASE("face_derivatives recovers an affine map") {
    const std::array<cplx, 3> dom = {cplx(0, 0), cplx(1, 0), cplx(0.3, 0.9)};
    const cplx A(2.0, 0.5), B(0.3, -0.1), C(1.0, 2.0);
    std::array<cplx, 3> img;
    for (int i = 0; i < 3; ++i) img[i] = A * dom[i] + B * std::conj(dom[i]) + C;
    const auto d = face_derivatives(dom, img);
    CHECK(std::abs(d.fz - A) <= 1e-13);
    CHECK(std::abs(d.fzbar - B) <= 1e-13);
    CHECK_FALSE(d.degenerate);
}

TEST_CASE("mu_planar_faces: identity, linear 2z+0.3conj(z), reflection") {
    const auto grid = tm::square_grid(4);
    const auto domain = tm::embedding_from_xy(grid);

    const auto id = mu_planar_faces(grid, domain, domain);
    for (std::size_t f = 0; f < id.size(); ++f) {
        CHECK(std::abs(id.mu[f]) <= 1e-14);
        CHECK(id.admissible[f]);
    }

    const auto lin = mu_planar_faces(grid, domain, apply_linear(domain, 2.0, 0.3, cplx(1, 1)));
    for (std::size_t f = 0; f < lin.size(); ++f) {
        CHECK(std::abs(lin.mu[f] - cplx(0.15, 0)) <= 1e-13);
        CHECK(lin.admissible[f]);
    }

    PlanarEmbedding reflected = domain;
    for (auto& z : reflected.pos) z = std::conj(z);
    const auto refl = mu_planar_faces(grid, domain, reflected);
    for (std::size_t f = 0; f < refl.size(); ++f) CHECK_FALSE(refl.admissible[f]);
}

TEST_CASE("|mu| < 1 iff PL determinant positive (randomized linear maps)") {
    const auto grid = tm::square_grid(3);
    const auto domain = tm::embedding_from_xy(grid);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 40; ++trial) {
        const cplx A(u(rng), u(rng)), B(u(rng), u(rng));
        if (std::abs(std::abs(A) - std::abs(B)) < 1e-3) continue;  // skip near-degenerate
        const auto image = apply_linear(domain, A, B, 0.0);
        const auto mu = mu_planar_faces(grid, domain, image);
        const auto signs = jacobian_sign(grid, domain, image);
        for (std::size_t f = 0; f < mu.size(); ++f) {
            const bool preserve = signs[f] > 0;
            CHECK(mu.admissible[f] == preserve);
            if (preserve) CHECK(std::abs(mu.mu[f]) < 1.0);
        }
    }
}

TEST_CASE("mu_surface_map: rigid motion of the domain gives mu = 0") {
    const auto m = tm::blob(2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    std::vector<Vec3> moved;
    for (const auto& p : m.vertices)
        moved.push_back({c * p.x - s * p.y + 2.0, s * p.x + c * p.y - 1.0, p.z + 0.5});
    const auto mu = mu_surface_map(m, m.vertices, moved);
    for (std::size_t f = 0; f < mu.size(); ++f) {
        CHECK(mu.admissible[f]);
        CHECK(std::abs(mu.mu[f]) <= 1e-12);
    }
}

TEST_CASE("mu_surface_map is invariant under rigid motions of either side") {
    const auto m = tm::blob(1);
    std::vector<Vec3> image;
    for (const auto& p : m.vertices) image.push_back({1.3 * p.x, 0.8 * p.y, p.z + 0.2 * p.x});
    const auto base = mu_surface_map(m, m.vertices, image);

    const double c = std::cos(1.1), s = std::sin(1.1);
    std::vector<Vec3> moved;
    for (const auto& p : image)
        moved.push_back({p.x, c * p.y - s * p.z - 3.0, s * p.y + c * p.z + 1.0});
    const auto rot = mu_surface_map(m, m.vertices, moved);
    for (std::size_t f = 0; f < base.size(); ++f)
        CHECK(std::abs(std::abs(base.mu[f]) - std::abs(rot.mu[f])) <= 1e-12);
}

TEST_CASE("discrete mu of the inverse ellipsoidal projection matches the analytic field") {
    // Refinement study on [-1,1]^2 grids; the finest level must agree with
    // mu_inv_ellip at face centroids within 0.02.
    const EllipsoidRadii r(2.0, 1.0, 1.0);
    double prev_max = 1e9;
    for (int n : {8, 16, 32, 64}) {
        const auto grid = tm::square_grid(n);
        TriMesh dom = grid;
        for (auto& v : dom.vertices) v = {2.0 * v.x - 1.0, 2.0 * v.y - 1.0, 0.0};
        std::vector<Vec3> image;
        for (const auto& v : dom.vertices)
            image.push_back(inv_ellip_stereographic(ComplexPoint(v.x, v.y), r, Pole::North));
        double max_dev = 0.0;
        for (std::size_t f = 0; f < dom.num_faces(); ++f) {
            const auto& fc = dom.faces[f];
            const std::array<cplx, 3> dz = {cplx(dom.vertices[fc[0]].x, dom.vertices[fc[0]].y),
                                            cplx(dom.vertices[fc[1]].x, dom.vertices[fc[1]].y),
                                            cplx(dom.vertices[fc[2]].x, dom.vertices[fc[2]].y)};
            const auto flat = flatten_triangle(image[fc[0]], image[fc[1]], image[fc[2]]);
            const auto d = face_derivatives(dz, flat);
            REQUIRE_FALSE(d.degenerate);
            const cplx centroid = (dz[0] + dz[1] + dz[2]) / 3.0;
            const double dev = std::abs(std::abs(d.fzbar / d.fz) -
                                        std::abs(mu_inv_ellip(centroid, r)));
            max_dev = std::max(max_dev, dev);
        }
        CHECK(max_dev < prev_max + 1e-12);
        prev_max = max_dev;
    }
    CHECK(prev_max <= 0.02);
}

TEST_CASE("compose_mu: identity reductions and brute-force oracle") {
    const cplx mu_f(0.2, 0.1);
    const cplx fz(1.3, -0.4);
    CHECK(std::abs(compose_mu(mu_f, fz, 0.0) - mu_f) <= 1e-14);

    // Brute force: compose two explicit linear maps and measure directly.
    const auto grid = tm::square_grid(2);
    const auto domain = tm::embedding_from_xy(grid);
    const cplx A1(1.0, 0.3), B1(0.2, -0.1);
    const cplx A2(0.9, -0.2), B2(0.1, 0.15);
    const auto mid = apply_linear(domain, A1, B1, 0.0);
    const auto end = apply_linear(mid, A2, B2, 0.0);
    const auto mf = mu_planar_faces(grid, domain, mid);
    const auto mg = mu_planar_faces(grid, mid, end);
    const auto direct = mu_planar_faces(grid, domain, end);
    for (std::size_t f = 0; f < mf.size(); ++f) {
        const cplx composed = compose_mu(mf.mu[f], A1, mg.mu[f]);
        CHECK(std::abs(composed - direct.mu[f]) <= 1e-10);
    }
}

TEST_CASE("dilatation oracles and monotonicity") {
    CHECK(dilatation(0.0) == doctest::Approx(1.0));
    CHECK(dilatation(cplx(1.0 / 3.0, 0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dilatation(cplx(0, 0.5)) == doctest::Approx(3.0).epsilon(1e-12));
    double prev = 0.0;
    for (double m = 0.0; m < 0.95; m += 0.05) {
        const double k = dilatation(cplx(m, 0));
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("truncate_mu clamps magnitude, keeps phase") {
    BeltramiField field;
    field.mu = {cplx(0.1, 0.2), std::polar(0.99, M_PI / 4), cplx(5.0, 0.0)};
    field.admissible = {true, true, false};
    const auto out = truncate_mu(field, 0.9);
    CHECK(std::abs(out.mu[0] - field.mu[0]) <= 1e-15);
    CHECK(std::abs(out.mu[1] - std::polar(0.9, M_PI / 4)) <= 1e-14);
    CHECK(std::abs(out.mu[2]) <= 0.9 + 1e-14);
    for (bool adm : out.admissible) CHECK(adm);
}

TEST_CASE("count_foldovers: identity sphere 0, constructed flip >= 1") {
    const auto m = tm::icosphere(2);
    const EllipsoidRadii unit(1, 1, 1);
    CHECK(count_foldovers(m, m.vertices, unit) == 0);

    auto param = m.vertices;
    std::swap(param[m.faces[0][0]], param[m.faces[0][1]]);
    CHECK(count_foldovers(m, param, unit) >= 1);
}

}  // TEST_SUITE
