#pragma once
#include <array>
#include <string>
#include <vector>

#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// TriMesh: indexed triangle mesh. Immutable after load by convention; all
// pipeline stages construct new vertex arrays instead of mutating.
// ---------------------------------------------------------------------------

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_faces() const { return faces.size(); }
};

struct TopologyReport {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::size_t face_count = 0;
    long euler_characteristic = 0;
    std::size_t boundary_edge_count = 0;
    bool orientation_consistent = false;
    bool closed = false;
    long genus = -1;  // (2 - chi)/2 when closed, -1 otherwise

    bool is_genus0_closed() const { return closed && orientation_consistent && genus == 0; }
};

struct FaceGeometry {
    double area = 0.0;
    std::array<double, 3> edge_lengths{};   // opposite vertex 0,1,2
    std::array<double, 3> angles{};         // interior angle at vertex 0,1,2
    bool degenerate = false;
};

TopologyReport validate_topology(const TriMesh& mesh);

FaceGeometry face_geometry(const TriMesh& mesh, int face);
FaceGeometry triangle_geometry(const Vec3& p0, const Vec3& p1, const Vec3& p2);

// 4*sqrt(3)*Area / (l1^2+l2^2+l3^2); 1 iff equilateral, 0 flagged for
// degenerate faces.
double face_regularity(const TriMesh& mesh, int face);

double total_area(const TriMesh& mesh);
double mesh_diameter(const TriMesh& mesh);

// Isometric flattening of one triangle into the complex plane: p0 -> 0,
// p1 -> (|p1-p0|, 0), p2 in the upper half plane. Used as the intrinsic
// per-face frame everywhere a 3D face enters a planar computation.
std::array<cplx, 3> flatten_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2);

}  // namespace ellipara
