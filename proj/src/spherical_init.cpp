#include "ellipara/spherical_init.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ellipara/lbs.hpp"
#include "ellipara/projections.hpp"

namespace ellipara {

int select_polar_face(const TriMesh& mesh) {
    int best = -1;
    double best_reg = 1e-6;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const double reg = face_regularity(mesh, static_cast<int>(f));
        if (reg > best_reg) {
            best_reg = reg;
            best = static_cast<int>(f);
        }
    }
    if (best < 0) throw std::runtime_error("no non-degenerate face available as polar face");
    return best;
}

namespace {

// Strict point-in-triangle test via signed areas; accepts either orientation.
bool strictly_inside(cplx p, cplx a, cplx b, cplx c) {
    const double s0 = ((b - a) * std::conj(p - a)).imag();
    const double s1 = ((c - b) * std::conj(p - b)).imag();
    const double s2 = ((a - c) * std::conj(p - c)).imag();
    return (s0 > 0 && s1 > 0 && s2 > 0) || (s0 < 0 && s1 < 0 && s2 < 0);
}

}  // namespace

int face_containing_origin(const TriMesh& mesh, const PlanarEmbedding& planar) {
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces[f];
        if (planar.is_infinite(fc[0]) || planar.is_infinite(fc[1]) || planar.is_infinite(fc[2]))
            continue;
        if (strictly_inside(cplx{0, 0}, planar.pos[fc[0]], planar.pos[fc[1]], planar.pos[fc[2]]))
            return static_cast<int>(f);
    }
    return -1;
}

PlanarEmbedding harmonic_flatten(const TriMesh& mesh, int deleted) {
    if (deleted < 0 || deleted >= static_cast<int>(mesh.num_faces()))
        throw std::invalid_argument("deleted face index out of range");

    const auto& df = mesh.faces[deleted];
    // Pin the deleted face's vertices to a congruent planar triangle, keeping
    // the face's own cyclic order. The remaining faces then draw with the
    // orientation a projection through the deleted face would give them.
    const auto pin_frame =
        flatten_triangle(mesh.vertices[df[0]], mesh.vertices[df[1]], mesh.vertices[df[2]]);

    ConstraintSet constraints;
    for (int i = 0; i < 3; ++i) constraints.pins.push_back({df[i], pin_frame[i]});

    std::vector<bool> mask(mesh.num_faces(), true);
    mask[deleted] = false;

    FaceFrames frames = frames_from_surface(mesh);
    BeltramiField zero;
    zero.mu.assign(mesh.num_faces(), cplx{0, 0});
    zero.admissible.assign(mesh.num_faces(), true);

    PlanarEmbedding flat = solve_lbs_frames(mesh, frames, zero, constraints, &mask);

    // Recenter so the origin lands strictly inside one face: find the face
    // containing the mean position (fallback: centroid nearest the mean) and
    // translate its centroid to the origin.
    cplx mean{0, 0};
    for (const auto& z : flat.pos) mean += z;
    mean /= static_cast<double>(flat.pos.size());

    int inner = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        if (static_cast<int>(f) == deleted) continue;
        const auto& fc = mesh.faces[f];
        const cplx a = flat.pos[fc[0]], b = flat.pos[fc[1]], c = flat.pos[fc[2]];
        if (strictly_inside(mean, a, b, c)) {
            inner = static_cast<int>(f);
            break;
        }
        const double d = std::abs((a + b + c) / 3.0 - mean);
        if (d < best_dist) {
            best_dist = d;
            inner = static_cast<int>(f);
        }
    }
    const auto& fc = mesh.faces[inner];
    const cplx shift = (flat.pos[fc[0]] + flat.pos[fc[1]] + flat.pos[fc[2]]) / 3.0;
    for (auto& z : flat.pos) z -= shift;
    return flat;
}

PlanarEmbedding invert_to_south(const PlanarEmbedding& planar) {
    double diameter = 0.0;
    for (std::size_t v = 0; v < planar.size(); ++v)
        if (!planar.is_infinite(static_cast<int>(v)))
            diameter = std::max(diameter, std::abs(planar.pos[v]));
    if (diameter <= 0.0) diameter = 1.0;

    PlanarEmbedding out;
    out.pos.resize(planar.size());
    for (std::size_t v = 0; v < planar.size(); ++v) {
        if (planar.is_infinite(static_cast<int>(v))) {
            out.pos[v] = cplx{0, 0};
            continue;
        }
        cplx z = planar.pos[v];
        if (std::abs(z) == 0.0) {
            std::fprintf(stderr,
                         "warning: vertex %zu at the inversion center, perturbing\n", v);
            z = cplx{1e-12 * diameter, 0.0};
        }
        out.pos[v] = z / std::norm(z);
    }
    return out;
}

PlanarEmbedding south_correction(const TriMesh& mesh, const PlanarEmbedding& inverted,
                                 int south_plane_outer_face, double fraction) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("correction fraction must lie in (0,1)");

    const std::size_t n = inverted.size();
    std::vector<double> radii;
    radii.reserve(n);
    for (const auto& z : inverted.pos) radii.push_back(std::abs(z));

    std::vector<double> sorted = radii;
    std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n));
    k = std::min(std::max<std::size_t>(k, 1), n - 4);
    std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
    const double threshold = sorted[k];

    ConstraintSet constraints;
    for (std::size_t v = 0; v < n; ++v)
        if (radii[v] >= threshold)
            constraints.pins.push_back({static_cast<int>(v), inverted.pos[v]});

    std::vector<bool> mask(mesh.num_faces(), true);
    if (south_plane_outer_face >= 0) mask[south_plane_outer_face] = false;

    FaceFrames frames = frames_from_surface(mesh);
    BeltramiField zero;
    zero.mu.assign(mesh.num_faces(), cplx{0, 0});
    zero.admissible.assign(mesh.num_faces(), true);

    return solve_lbs_frames(mesh, frames, zero, constraints, &mask, &inverted);
}

SphericalInit spherical_param(const TriMesh& mesh, const SphericalInitOptions& opts) {
    const TopologyReport topo = validate_topology(mesh);
    if (!topo.is_genus0_closed()) {
        std::string why = !topo.closed            ? "surface is not closed"
                          : !topo.orientation_consistent ? "orientation is inconsistent"
                                                         : "genus " + std::to_string(topo.genus);
        throw std::runtime_error("mesh is not a closed genus-0 surface: " + why);
    }

    SphericalInit init;
    init.north_face = select_polar_face(mesh);
    PlanarEmbedding flat = harmonic_flatten(mesh, init.north_face);

    init.south_face = face_containing_origin(mesh, flat);
    if (init.south_face < 0)
        throw std::runtime_error("flattening left no face over the origin");

    PlanarEmbedding inverted = invert_to_south(flat);
    PlanarEmbedding corrected =
        south_correction(mesh, inverted, init.south_face, opts.correction_fraction);
    init.planar = invert_to_south(corrected);

    // The correction frees the region near the deleted face; the origin-facing
    // face was pinned, but re-locate defensively.
    if (face_containing_origin(mesh, init.planar) != init.south_face) {
        const int relocated = face_containing_origin(mesh, init.planar);
        if (relocated < 0) throw std::runtime_error("correction moved every face off the origin");
        init.south_face = relocated;
    }
    return init;
}

std::vector<Vec3> lift_to_sphere(const PlanarEmbedding& planar) {
    std::vector<Vec3> out(planar.size());
    for (std::size_t v = 0; v < planar.size(); ++v) {
        if (planar.is_infinite(static_cast<int>(v)))
            out[v] = Vec3{0, 0, 1};
        else
            out[v] = inv_stereographic(ComplexPoint(planar.pos[v]), Pole::North);
    }
    return out;
}

}  // namespace ellipara
