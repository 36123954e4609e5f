#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ellipara/mesh_io.hpp"
#include "support/meshes.hpp"

using namespace ellipara;
namespace tm = ellipara::testing;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("/tmp/ellipara_io_") + name;
}

void check_roundtrip(const TriMesh& m, const std::string& ext) {
    const auto path = temp_path("rt." + ext);
    write_mesh(m, path);
    const auto loaded = load_mesh(path);
    REQUIRE(loaded.num_vertices() == m.num_vertices());
    REQUIRE(loaded.faces == m.faces);
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        CHECK(norm(loaded.vertices[i] - m.vertices[i]) <= 1e-13);
    std::remove(path.c_str());
}

}  // namespace

TEST_SUITE("mesh_io") {

TEST_CASE("minimal OBJ tetrahedron parses") {
    const auto path = temp_path("tet.obj");
    {
        std::ofstream out(path);
        out << "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
               "f 1 3 2\nf 1 2 4\nf 2 3 4\nf 1 4 3\n";
    }
    const auto m = load_mesh(path);
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_faces() == 4);
    CHECK(m.faces[0] == std::array<int, 3>{0, 2, 1});  // 1-based converted
    std::remove(path.c_str());
}

TEST_CASE("OFF icosahedron: V=12, F=20") {
    const auto path = temp_path("ico.off");
    write_mesh(tm::icosahedron(), path);
    const auto m = load_mesh(path);
    CHECK(m.num_vertices() == 12);
    CHECK(m.num_faces() == 20);
    std::remove(path.c_str());
}

TEST_CASE("OBJ quad face is rejected") {
    const auto path = temp_path("quad.obj");
    {
        std::ofstream out(path);
        out << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    }
    CHECK_THROWS_WITH_AS(load_mesh(path), doctest::Contains("non-triangular"),
                         std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("round-trips through obj/off/ply") {
    const auto m = tm::blob(2);
    check_roundtrip(m, "obj");
    check_roundtrip(m, "off");
    check_roundtrip(m, "ply");
}

TEST_CASE("format_from_path and unsupported extension") {
    CHECK(format_from_path("a/b/mesh.obj") == MeshFormat::Obj);
    CHECK(format_from_path("mesh.OFF") == MeshFormat::Off);
    CHECK(format_from_path("x.ply") == MeshFormat::Ply);
    CHECK_THROWS_AS(write_mesh(tm::tetrahedron(), temp_path("m.stl")), std::runtime_error);
}

TEST_CASE("missing file reports an error") {
    CHECK_THROWS_AS(load_mesh("/tmp/ellipara_io_does_not_exist.obj"), std::runtime_error);
}

TEST_CASE("writer precision survives awkward coordinates") {
    TriMesh m = tm::tetrahedron();
    m.vertices[0] = {1.0 / 3.0, -2.0e-7, 1.2345678901234567};
    check_roundtrip(m, "obj");
    check_roundtrip(m, "ply");
}

}  // TEST_SUITE
