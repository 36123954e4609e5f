#include <cmath>

#include "doctest.h"
#include "ellipara/mesh.hpp"
#include "support/meshes.hpp"

using namespace ellipara;
namespace tm = ellipara::testing;

TEST_SUITE("mesh_core") {

TEST_CASE("tetrahedron topology: closed, genus 0") {
    const auto report = validate_topology(tm::tetrahedron());
    CHECK(report.vertex_count == 4);
    CHECK(report.edge_count == 6);
    CHECK(report.face_count == 4);
    CHECK(report.euler_characteristic == 2);
    CHECK(report.boundary_edge_count == 0);
    CHECK(report.closed);
    CHECK(report.orientation_consistent);
    CHECK(report.genus == 0);
    CHECK(report.is_genus0_closed());
}

TEST_CASE("icosahedron counts") {
    const auto report = validate_topology(tm::icosahedron());
    CHECK(report.vertex_count == 12);
    CHECK(report.edge_count == 30);
    CHECK(report.face_count == 20);
    CHECK(report.genus == 0);
}

TEST_CASE("torus: chi = 0, genus 1") {
    const auto report = validate_topology(tm::torus());
    CHECK(report.closed);
    CHECK(report.euler_characteristic == 0);
    CHECK(report.genus == 1);
    CHECK_FALSE(report.is_genus0_closed());
}

TEST_CASE("single triangle: 3 boundary edges, not closed") {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    const auto report = validate_topology(m);
    CHECK(report.boundary_edge_count == 3);
    CHECK_FALSE(report.closed);
    CHECK(report.genus == -1);
}

TEST_CASE("inconsistent orientation is detected") {
    auto m = tm::tetrahedron();
    std::swap(m.faces[1][0], m.faces[1][1]);
    const auto report = validate_topology(m);
    CHECK_FALSE(report.orientation_consistent);
    CHECK_FALSE(report.is_genus0_closed());
}

TEST_CASE("face_geometry: unit right triangle") {
    const auto g = triangle_geometry({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK(g.area == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.angles[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(g.angles[1] == doctest::Approx(M_PI / 4).epsilon(1e-12));
    CHECK(g.angles[2] == doctest::Approx(M_PI / 4).epsilon(1e-12));
    CHECK(g.angles[0] + g.angles[1] + g.angles[2] == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK_FALSE(g.degenerate);
}

TEST_CASE("face_geometry: equilateral side 2 has area sqrt(3)") {
    const auto g = triangle_geometry({0, 0, 0}, {2, 0, 0}, {1, std::sqrt(3.0), 0});
    CHECK(g.area == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("face_geometry: collinear vertices are degenerate") {
    const auto g = triangle_geometry({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
    CHECK(g.area == doctest::Approx(0.0));
    CHECK(g.degenerate);
}

TEST_CASE("face_regularity: equilateral 1, right isosceles sqrt(3)/2") {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0},  // equilateral
                  {0, 0, 1}, {1, 0, 1}, {0, 1, 1},                     // right isosceles
                  {0, 0, 2}, {1, 0, 2}, {1.9995, 0.01, 2}};            // near-needle
    m.faces = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
    CHECK(face_regularity(m, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(face_regularity(m, 1) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(face_regularity(m, 2) < 0.1);
}

TEST_CASE("face_regularity is similarity invariant") {
    // Random similarity transform: scale + rotation + translation.
    const double s = 2.7;
    const double c = std::cos(0.9), sn = std::sin(0.9);
    auto xform = [&](const Vec3& p) {
        return Vec3{s * (c * p.x - sn * p.y) + 3.0, s * (sn * p.x + c * p.y) - 1.0, s * p.z + 2.0};
    };
    TriMesh m;
    m.vertices = {{0.1, 0.2, 0.3}, {1.3, -0.4, 0.2}, {0.5, 0.9, -0.7}};
    m.faces = {{0, 1, 2}};
    TriMesh t = m;
    for (auto& v : t.vertices) v = xform(v);
    CHECK(face_regularity(m, 0) == doctest::Approx(face_regularity(t, 0)).epsilon(1e-12));
}

TEST_CASE("flatten_triangle is isometric and canonical") {
    const Vec3 p0{0.3, 1.2, -0.5}, p1{1.7, 0.4, 0.8}, p2{-0.2, 0.9, 1.4};
    const auto f = flatten_triangle(p0, p1, p2);
    CHECK(std::abs(f[0]) == doctest::Approx(0.0));
    CHECK(f[1].imag() == doctest::Approx(0.0));
    CHECK(f[1].real() == doctest::Approx(norm(p1 - p0)).epsilon(1e-13));
    CHECK(f[2].imag() > 0.0);
    CHECK(std::abs(f[2] - f[1]) == doctest::Approx(norm(p2 - p1)).epsilon(1e-13));
    CHECK(std::abs(f[2]) == doctest::Approx(norm(p2 - p0)).epsilon(1e-13));
}

TEST_CASE("total_area and mesh_diameter on the unit icosphere") {
    const auto m = tm::icosphere(3);
    CHECK(total_area(m) == doctest::Approx(4 * M_PI).epsilon(0.01));
    CHECK(mesh_diameter(m) == doctest::Approx(2.0).epsilon(1e-6));
}

}  // TEST_SUITE
