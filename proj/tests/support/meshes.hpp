#pragma once
// Synthetic meshes for the test suites. Everything here is deterministic.

#include <cmath>
#include <map>
#include <utility>

#include "ellipara/mesh.hpp"

namespace ellipara::testing {

// Icosahedron with apex vertices on the +-z axis (vertex 0 at +z, vertex 11
// at -z), so that midpoint subdivision keeps both poles as mesh vertices and
// vertex 1 sits on the +x side of the equator band.
inline TriMesh icosahedron() {
    TriMesh m;
    const double lat = std::atan(0.5);
    m.vertices.push_back({0, 0, 1});
    for (int ring = 0; ring < 2; ++ring) {
        const double z = (ring == 0 ? std::sin(lat) : -std::sin(lat));
        const double r = std::cos(lat);
        const double offset = (ring == 0 ? 0.0 : M_PI / 5.0);
        for (int i = 0; i < 5; ++i) {
            const double phi = offset + 2.0 * M_PI * i / 5.0;
            m.vertices.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
    }
    m.vertices.push_back({0, 0, -1});

    for (int i = 0; i < 5; ++i) {
        const int j = (i + 1) % 5;
        const int ui = 1 + i, uj = 1 + j;       // upper ring
        const int li = 6 + i, lj = 6 + j;       // lower ring
        m.faces.push_back({0, ui, uj});         // cap
        m.faces.push_back({ui, li, uj});        // band
        m.faces.push_back({uj, li, lj});        // band
        m.faces.push_back({11, lj, li});        // cap
    }
    return m;
}

inline TriMesh subdivide(const TriMesh& in) {
    TriMesh out;
    out.vertices = in.vertices;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (in.vertices[a] + in.vertices[b]));
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& f : in.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({f[1], bc, ab});
        out.faces.push_back({f[2], ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

inline TriMesh icosphere(int subdivisions) {
    TriMesh m = icosahedron();
    for (int s = 0; s < subdivisions; ++s) m = subdivide(m);
    for (auto& v : m.vertices) v = normalized(v);
    return m;
}

// Unit icosphere stretched onto E_{a,b,c}; poles stay at (0,0,+-c).
inline TriMesh ellipsoid_mesh(double a, double b, double c, int subdivisions) {
    TriMesh m = icosphere(subdivisions);
    for (auto& v : m.vertices) v = {a * v.x, b * v.y, c * v.z};
    return m;
}

// Smooth genus-0 blob: radially perturbed sphere. amplitude < 1 keeps it
// star-shaped, hence embedded.
inline TriMesh blob(int subdivisions, double amplitude = 0.25) {
    TriMesh m = icosphere(subdivisions);
    for (auto& v : m.vertices) {
        const double bump = 1.0 + amplitude * std::sin(3.0 * v.x) * std::cos(2.0 * v.y) +
                            0.5 * amplitude * std::sin(2.0 * v.z);
        v = bump * v;
    }
    return m;
}

// Blob stretched along x to a controlled extent ratio.
inline TriMesh elongated_blob(int subdivisions, double ratio) {
    TriMesh m = blob(subdivisions, 0.15);
    for (auto& v : m.vertices) v.x *= ratio;
    return m;
}

inline TriMesh torus(int nu = 24, int nv = 12, double R = 2.0, double r = 0.5) {
    TriMesh m;
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * M_PI * j / nv;
            m.vertices.push_back({(R + r * std::cos(v)) * std::cos(u),
                                  (R + r * std::cos(v)) * std::sin(u), r * std::sin(v)});
        }
    }
    auto idx = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            m.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            m.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    return m;
}

inline TriMesh tetrahedron() {
    TriMesh m;
    m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return m;
}

// Planar triangulated unit square [0,1]^2 as a TriMesh in the z=0 plane, with
// a matching PlanarEmbedding of the identity; used by the planar LBS tests.
inline TriMesh square_grid(int n) {
    TriMesh m;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0});
    auto idx = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            m.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    return m;
}

inline PlanarEmbedding embedding_from_xy(const TriMesh& m) {
    PlanarEmbedding e;
    e.pos.reserve(m.num_vertices());
    for (const auto& v : m.vertices) e.pos.emplace_back(v.x, v.y);
    return e;
}

// Boundary vertices of a square_grid(n) mesh.
inline std::vector<int> square_grid_boundary(int n) {
    std::vector<int> b;
    auto idx = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (i == 0 || j == 0 || i == n || j == n) b.push_back(idx(i, j));
    return b;
}

}  // namespace ellipara::testing
