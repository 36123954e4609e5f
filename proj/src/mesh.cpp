#include "ellipara/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <unordered_map>

namespace ellipara {

namespace {

// Undirected edge key packing two 32-bit indices.
std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

TopologyReport validate_topology(const TriMesh& mesh) {
    TopologyReport rep;
    rep.vertex_count = mesh.num_vertices();
    rep.face_count = mesh.num_faces();

    // Per undirected edge: total incidence and net direction count. An
    // orientation-consistent interior edge appears once in each direction.
    struct EdgeInfo {
        int count = 0;
        int direction_sum = 0;  // +1 for (a<b), -1 for (b<a)
    };
    std::unordered_map<std::uint64_t, EdgeInfo> edges;
    edges.reserve(mesh.num_faces() * 3);

    bool indices_valid = true;
    for (const auto& f : mesh.faces) {
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) indices_valid = false;
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (a < 0 || b < 0 || a >= static_cast<int>(mesh.num_vertices()) ||
                b >= static_cast<int>(mesh.num_vertices())) {
                indices_valid = false;
                continue;
            }
            auto& info = edges[edge_key(a, b)];
            info.count += 1;
            info.direction_sum += (a < b) ? 1 : -1;
        }
    }

    rep.edge_count = edges.size();
    rep.euler_characteristic = static_cast<long>(rep.vertex_count) -
                               static_cast<long>(rep.edge_count) +
                               static_cast<long>(rep.face_count);

    bool consistent = indices_valid;
    for (const auto& [key, info] : edges) {
        if (info.count == 1) {
            rep.boundary_edge_count += 1;
        } else if (info.count != 2 || info.direction_sum != 0) {
            consistent = false;  // non-manifold or same-direction duplicate
        }
    }
    rep.orientation_consistent = consistent;
    rep.closed = rep.boundary_edge_count == 0 && indices_valid;
    if (rep.closed) rep.genus = (2 - rep.euler_characteristic) / 2;
    return rep;
}

FaceGeometry triangle_geometry(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    FaceGeometry g;
    const Vec3 e01 = p1 - p0, e12 = p2 - p1, e20 = p0 - p2;
    g.edge_lengths = {norm(e12), norm(e20), norm(e01)};
    g.area = 0.5 * norm(cross(e01, p2 - p0));
    g.degenerate = g.area <= 0.0;

    auto angle_at = [](const Vec3& a, const Vec3& b) {
        double s = norm(cross(a, b));
        double c = dot(a, b);
        return std::atan2(s, c);
    };
    g.angles = {angle_at(e01, -1.0 * e20), angle_at(e12, -1.0 * e01),
                angle_at(e20, -1.0 * e12)};
    return g;
}

FaceGeometry face_geometry(const TriMesh& mesh, int face) {
    const auto& f = mesh.faces.at(face);
    return triangle_geometry(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
}

double face_regularity(const TriMesh& mesh, int face) {
    FaceGeometry g = face_geometry(mesh, face);
    double sum_sq = 0.0;
    for (double l : g.edge_lengths) sum_sq += l * l;
    if (sum_sq <= 0.0) return 0.0;
    return 4.0 * std::numbers::sqrt3 * g.area / sum_sq;
}

double total_area(const TriMesh& mesh) {
    double a = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) a += face_geometry(mesh, static_cast<int>(f)).area;
    return a;
}

double mesh_diameter(const TriMesh& mesh) {
    if (mesh.vertices.empty()) return 0.0;
    Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
    for (const auto& v : mesh.vertices) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    return norm(hi - lo);
}

std::array<cplx, 3> flatten_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const double l1 = norm(e1);
    if (l1 <= 0.0) return {cplx(0, 0), cplx(0, 0), cplx(0, 0)};
    const Vec3 u = e1 / l1;
    const double xd = dot(e2, u);
    const double yd = norm(e2 - xd * u);
    return {cplx(0, 0), cplx(l1, 0), cplx(xd, yd)};
}

}  // namespace ellipara
