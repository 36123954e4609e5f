#include "ellipara/fecm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipara/beltrami.hpp"
#include "ellipara/lbs.hpp"
#include "ellipara/projections.hpp"

namespace ellipara {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

Eigen::Matrix3d pca_axes(const TriMesh& mesh, Vec3* centroid_out = nullptr) {
    Vec3 c{0, 0, 0};
    for (const auto& p : mesh.vertices) c += p;
    c = c / static_cast<double>(mesh.num_vertices());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : mesh.vertices) {
        Eigen::Vector3d d(p.x - c.x, p.y - c.y, p.z - c.z);
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("PCA failed");
    if (centroid_out) *centroid_out = c;
    // Columns sorted by descending variance.
    Eigen::Matrix3d axes;
    axes.col(0) = es.eigenvectors().col(2);
    axes.col(1) = es.eigenvectors().col(1);
    axes.col(2) = es.eigenvectors().col(0);
    return axes;
}

int extreme_vertex(const TriMesh& mesh, const Vec3& centroid, const Eigen::Vector3d& axis,
                   double sign) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3 d = mesh.vertices[v] - centroid;
        const double val = sign * (axis.x() * d.x + axis.y() * d.y + axis.z() * d.z);
        if (val > best_val) {
            best_val = val;
            best = static_cast<int>(v);
        }
    }
    return best;
}

}  // namespace

ResolvedPoles resolve_pole_vertices(const TriMesh& mesh, const PoleSpec& spec) {
    const int n = static_cast<int>(mesh.num_vertices());
    auto in_range = [n](int v) { return v >= 0 && v < n; };

    ResolvedPoles out{spec.north_vertex, spec.south_vertex, spec.align_vertex};
    if (out.north_vertex < 0 || out.south_vertex < 0 || out.align_vertex < 0) {
        Vec3 centroid;
        const Eigen::Matrix3d axes = pca_axes(mesh, &centroid);
        if (out.north_vertex < 0) out.north_vertex = extreme_vertex(mesh, centroid, axes.col(0), 1.0);
        if (out.south_vertex < 0) out.south_vertex = extreme_vertex(mesh, centroid, axes.col(0), -1.0);
        if (out.align_vertex < 0) {
            out.align_vertex = extreme_vertex(mesh, centroid, axes.col(1), 1.0);
            if (out.align_vertex == out.north_vertex || out.align_vertex == out.south_vertex)
                out.align_vertex = extreme_vertex(mesh, centroid, axes.col(1), -1.0);
        }
    }
    if (!in_range(out.north_vertex) || !in_range(out.south_vertex) || !in_range(out.align_vertex))
        throw std::invalid_argument("pole vertex index out of range");
    if (out.north_vertex == out.south_vertex || out.north_vertex == out.align_vertex ||
        out.south_vertex == out.align_vertex)
        throw std::invalid_argument("pole vertices must be distinct");
    return out;
}

MobiusAlignment resolve_poles(const TriMesh& mesh, const SphericalInit& init,
                              const ResolvedPoles& poles) {
    (void)mesh;
    return MobiusAlignment(init.planar.pos[poles.south_vertex],
                           init.planar.pos[poles.north_vertex],
                           init.planar.pos[poles.align_vertex]);
}

double balance_scale(const TriMesh& mesh, const PlanarEmbedding& planar, int north_face,
                     int south_face) {
    auto perimeter = [&](int face, bool swapped) {
        const auto& f = mesh.faces[face];
        std::array<cplx, 3> z;
        for (int i = 0; i < 3; ++i) {
            if (planar.is_infinite(f[i]))
                throw std::runtime_error("balance face touches the infinity vertex");
            cplx p = planar.pos[f[i]];
            if (swapped) {
                if (std::abs(p) == 0.0)
                    throw std::runtime_error("balance face touches the origin");
                p = p / std::norm(p);
            }
            z[i] = p;
        }
        return std::abs(z[1] - z[0]) + std::abs(z[2] - z[1]) + std::abs(z[0] - z[2]);
    };
    const double per_n = perimeter(north_face, false);
    const double per_s = perimeter(south_face, true);
    if (per_n <= 0.0 || per_s <= 0.0) throw std::runtime_error("degenerate balance face");
    return std::sqrt(per_n * per_s) / per_n;
}

std::vector<cplx> pl_invert(const TriMesh& mesh, const PlanarEmbedding& map_domain,
                            const PlanarEmbedding& map_image, const std::vector<cplx>& queries,
                            int* outside_count, std::vector<char>* outside_flags) {
    struct Cell {
        std::vector<int> faces;
    };

    // Collect faces usable for location: finite in both embeddings and
    // non-degenerate in the image.
    std::vector<int> usable;
    usable.reserve(mesh.num_faces());
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_y;
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto& f = mesh.faces[fi];
        bool ok = true;
        for (int v : f)
            if (map_domain.is_infinite(v) || map_image.is_infinite(v)) ok = false;
        if (!ok) continue;
        const cplx a = map_image.pos[f[0]], b = map_image.pos[f[1]], c = map_image.pos[f[2]];
        const double den = ((b - a) * std::conj(c - a)).imag();
        if (std::abs(den) <= 1e-300) continue;
        usable.push_back(static_cast<int>(fi));
        for (const cplx& z : {a, b, c}) {
            lo_x = std::min(lo_x, z.real());
            hi_x = std::max(hi_x, z.real());
            lo_y = std::min(lo_y, z.imag());
            hi_y = std::max(hi_y, z.imag());
        }
    }
    if (usable.empty()) throw std::runtime_error("no usable face for inverse evaluation");

    const int res = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(usable.size()))),
                               1, 1024);
    const double wx = std::max(hi_x - lo_x, 1e-300), wy = std::max(hi_y - lo_y, 1e-300);
    auto cell_of = [&](double x, double y) {
        const int ix = std::clamp(static_cast<int>((x - lo_x) / wx * res), 0, res - 1);
        const int iy = std::clamp(static_cast<int>((y - lo_y) / wy * res), 0, res - 1);
        return iy * res + ix;
    };
    std::vector<Cell> grid(static_cast<std::size_t>(res) * res);
    for (int fi : usable) {
        const auto& f = mesh.faces[fi];
        double fx0 = std::numeric_limits<double>::infinity(), fy0 = fx0, fx1 = -fx0, fy1 = -fy0;
        for (int v : f) {
            fx0 = std::min(fx0, map_image.pos[v].real());
            fx1 = std::max(fx1, map_image.pos[v].real());
            fy0 = std::min(fy0, map_image.pos[v].imag());
            fy1 = std::max(fy1, map_image.pos[v].imag());
        }
        const int ix0 = std::clamp(static_cast<int>((fx0 - lo_x) / wx * res), 0, res - 1);
        const int ix1 = std::clamp(static_cast<int>((fx1 - lo_x) / wx * res), 0, res - 1);
        const int iy0 = std::clamp(static_cast<int>((fy0 - lo_y) / wy * res), 0, res - 1);
        const int iy1 = std::clamp(static_cast<int>((fy1 - lo_y) / wy * res), 0, res - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                grid[static_cast<std::size_t>(iy) * res + ix].faces.push_back(fi);
    }

    // Barycentric coordinates of q in the image of one face; returns the
    // minimum coordinate (negative when outside).
    auto bary = [&](int fi, cplx q, std::array<double, 3>& w) {
        const auto& f = mesh.faces[fi];
        const cplx a = map_image.pos[f[0]], b = map_image.pos[f[1]], c = map_image.pos[f[2]];
        const double den = ((b - a) * std::conj(c - a)).imag();
        w[0] = ((b - q) * std::conj(c - q)).imag() / den;
        w[1] = ((c - q) * std::conj(a - q)).imag() / den;
        w[2] = 1.0 - w[0] - w[1];
        return std::min({w[0], w[1], w[2]});
    };

    int outside = 0;
    if (outside_flags) outside_flags->assign(queries.size(), 0);
    std::vector<cplx> result(queries.size());
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const cplx q = queries[qi];
        int best_face = -1;
        std::array<double, 3> best_w{};
        double best_min = -std::numeric_limits<double>::infinity();

        const auto& cell = grid[cell_of(q.real(), q.imag())];
        for (int fi : cell.faces) {
            std::array<double, 3> w;
            const double m = bary(fi, q, w);
            if (m > best_min) {
                best_min = m;
                best_face = fi;
                best_w = w;
            }
            if (m >= -1e-9) break;
        }
        if (best_min < -1e-9) {
            // Global fallback: nearest face by least-negative coordinate.
            for (int fi : usable) {
                std::array<double, 3> w;
                const double m = bary(fi, q, w);
                if (m > best_min) {
                    best_min = m;
                    best_face = fi;
                    best_w = w;
                }
                if (m >= -1e-9) break;
            }
            if (best_min < -1e-9) {
                ++outside;
                if (outside_flags) (*outside_flags)[qi] = 1;
            }
        }
        // Clamp and renormalize; harmless inside, nearest-face snap outside.
        double sum = 0.0;
        for (double& w : best_w) {
            w = std::max(w, 0.0);
            sum += w;
        }
        const auto& f = mesh.faces[best_face];
        result[qi] = (best_w[0] * map_domain.pos[f[0]] + best_w[1] * map_domain.pos[f[1]] +
                      best_w[2] * map_domain.pos[f[2]]) /
                     sum;
    }
    if (outside_count) *outside_count = outside;
    return result;
}

namespace {

// Far from the origin the prescribed coefficient tends to m (z/conj(z))^2
// with m = (a-b)/(a+b): a bounded, angularly oscillating field that no
// per-face constant can represent on the huge triangles near the puncture.
// We therefore factor the solution as psi = eta o B, where
//     B(z) = z g / (g + m z^2),   g = |z|^2 + r0^2
// is an explicit quasi-conformal homeomorphism of the extended plane whose
// coefficient mu_B = m z^4 / (g^2 - m r0^2 z^2) matches the prescribed field
// exactly at infinity and vanishes at the origin. The residual coefficient
// left for eta decays like O(1/|z|^2) in the far field and stays smooth at
// the origin, so the finite-element solve only ever sees a well-resolved
// field. The transition radius r0 is placed where the embedding is densest.
struct FarFieldFactor {
    double m;
    double r02;

    cplx value(cplx z) const {
        const double g = std::norm(z) + r02;
        return z * g / (g + m * z * z);
    }
    cplx mu(cplx z) const {
        const double g = std::norm(z) + r02;
        return m * z * z * z * z / (g * g - m * r02 * z * z);
    }
    cplx deriv_z(cplx z) const {
        const double g = std::norm(z) + r02;
        const cplx d = g + m * z * z;
        return (g * g - m * r02 * z * z) / (d * d);
    }
    cplx deriv_zbar(cplx z) const {
        const double g = std::norm(z) + r02;
        const cplx d = g + m * z * z;
        return m * z * z * z * z / (d * d);
    }
    // Inverse of B by damped Wirtinger-Newton; B is a global homeomorphism,
    // so this converges from the start guess z = w.
    cplx invert(cplx w) const {
        cplx z = w;
        for (int it = 0; it < 60; ++it) {
            const cplx res = w - value(z);
            if (std::abs(res) <= 1e-13 * (1.0 + std::abs(w))) break;
            const cplx bz = deriv_z(z), bzb = deriv_zbar(z);
            const double det = std::norm(bz) - std::norm(bzb);
            const cplx step =
                (std::conj(bz) * res - bzb * std::conj(res)) / det;
            z += step;
        }
        return z;
    }
    // Coefficient to prescribe for eta at B(z) so that eta o B carries the
    // total coefficient mu_total at z.
    cplx residual(cplx z, cplx mu_total) const {
        const cplx mu_b = mu(z);
        const cplx bz = deriv_z(z);
        const cplx rhat = std::conj(bz) / bz;
        return (mu_total - mu_b) / (rhat * (cplx{1, 0} - mu_total * std::conj(mu_b)));
    }
};

FarFieldFactor make_far_field_factor(const PlanarEmbedding& planar, const EllipsoidRadii& r) {
    FarFieldFactor factor;
    factor.m = (r.a - r.b) / (r.a + r.b);
    std::vector<double> radii;
    radii.reserve(planar.pos.size());
    for (std::size_t v = 0; v < planar.pos.size(); ++v) {
        if (planar.is_infinite(static_cast<int>(v))) continue;
        const double rad = std::abs(planar.pos[v]);
        if (rad > 0.0) radii.push_back(rad);
    }
    if (radii.empty()) throw std::runtime_error("planar embedding has no usable vertices");
    auto mid = radii.begin() + static_cast<std::ptrdiff_t>(radii.size() / 2);
    std::nth_element(radii.begin(), mid, radii.end());
    factor.r02 = (*mid) * (*mid);
    return factor;
}

std::vector<cplx> residual_vertex_field(const TriMesh& mesh, const PlanarEmbedding& sample,
                                        const PlanarEmbedding& planar, const EllipsoidRadii& r,
                                        const FarFieldFactor& factor) {
    std::vector<cplx> vertex_nu(mesh.num_vertices(), cplx{0, 0});
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (planar.is_infinite(static_cast<int>(v))) continue;
        const cplx target = mu_inv_ellip(sample.pos[v], r);
        vertex_nu[v] = factor.residual(planar.pos[v], target);
    }
    return vertex_nu;
}

ConstraintSet puncture_ring_pins(const TriMesh& mesh, const PlanarEmbedding& transformed) {
    ConstraintSet constraints;
    if (transformed.infinity_vertex < 0)
        throw std::runtime_error("expected an infinity vertex in the aligned embedding");
    std::vector<char> in_ring(mesh.num_vertices(), 0);
    for (const auto& f : mesh.faces) {
        if (f[0] != transformed.infinity_vertex && f[1] != transformed.infinity_vertex &&
            f[2] != transformed.infinity_vertex)
            continue;
        for (int v : f)
            if (v != transformed.infinity_vertex) in_ring[v] = 1;
    }
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (in_ring[v]) constraints.pins.push_back({static_cast<int>(v), transformed.pos[v]});
    return constraints;
}

}  // namespace

QcComposition qc_compose_to_ellipsoid(const TriMesh& mesh, const PlanarEmbedding& planar,
                                      const EllipsoidRadii& r, bool fixed_point_refine,
                                      const std::vector<int>* pin_vertices) {
    const FarFieldFactor factor = make_far_field_factor(planar, r);

    // Domain of the residual solve: the embedding pushed through B. The
    // solved values are also the values of psi = eta o B at the original
    // vertices, so the inverse can be interpolated on the original embedding.
    PlanarEmbedding transformed = planar;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (!planar.is_infinite(static_cast<int>(v)))
            transformed.pos[v] = factor.value(planar.pos[v]);

    ConstraintSet pins;
    if (pin_vertices) {
        for (int v : *pin_vertices) {
            if (planar.is_infinite(v)) continue;
            pins.pins.push_back({v, transformed.pos[v]});
        }
    }
    if (pins.pins.empty()) pins = puncture_ring_pins(mesh, transformed);

    std::vector<cplx> queries;
    std::vector<int> query_vertex;
    queries.reserve(mesh.num_vertices());
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (planar.is_infinite(static_cast<int>(v))) continue;
        queries.push_back(planar.pos[v]);
        query_vertex.push_back(static_cast<int>(v));
    }

    // Per-vertex Möbius maps and the factor B can fold a handful of very
    // large far-field triangles (a triangle flips under such a map when the
    // fold center lands inside its circumcircle). A folded frame breaks the
    // finite-element identities and would poison the whole solve, so pin all
    // three corners of every face folded against the majority orientation —
    // in the domain or in its B-image — to their B-images: a face whose
    // vertices are all constrained contributes nothing to the free system,
    // and the factor is already near-identity for the residual out there.
    FaceFrames frames = frames_from_embedding(mesh, transformed);
    std::vector<bool> face_mask(mesh.num_faces(), true);
    std::vector<char> pinned(mesh.num_vertices(), 0);
    double flip_radius = std::numeric_limits<double>::infinity();
    for (const auto& c : pins.pins) pinned[c.vertex] = 1;
    const auto signed_area = [](cplx a, cplx b, cplx c) {
        const cplx d1 = b - a, d2 = c - a;
        return d1.real() * d2.imag() - d1.imag() * d2.real();
    };
    long orient_votes = 0;
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto& f = mesh.faces[fi];
        if (planar.is_infinite(f[0]) || planar.is_infinite(f[1]) || planar.is_infinite(f[2])) {
            face_mask[fi] = false;
            continue;
        }
        orient_votes +=
            signed_area(planar.pos[f[0]], planar.pos[f[1]], planar.pos[f[2]]) > 0.0 ? 1 : -1;
    }
    const double orient_ref = orient_votes >= 0 ? 1.0 : -1.0;
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        if (!face_mask[fi]) continue;
        const auto& f = mesh.faces[fi];
        const double before =
            signed_area(planar.pos[f[0]], planar.pos[f[1]], planar.pos[f[2]]) * orient_ref;
        const double after =
            signed_area(transformed.pos[f[0]], transformed.pos[f[1]], transformed.pos[f[2]]) *
            orient_ref;
        if (before < 0.0 || after < 0.0) {
            for (int v : f) {
                flip_radius = std::min(flip_radius, std::abs(planar.pos[v]));
                if (pinned[v]) continue;
                pinned[v] = 1;
                pins.pins.push_back({v, transformed.pos[v]});
            }
        }
    }
    // The image of a folded face overlaps its neighbours, which would let the
    // PL point location pick the wrong pre-image; evaluate the inverse
    // analytically for every query at or beyond the folded region.
    const double far_query_radius = 0.7 * flip_radius;

    PlanarEmbedding sample = planar;
    PlanarEmbedding inverse;
    const int passes = fixed_point_refine ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
        const std::vector<cplx> nu = residual_vertex_field(mesh, sample, planar, r, factor);
        BeltramiField mu;
        mu.mu.assign(mesh.num_faces(), cplx{0, 0});
        mu.admissible.assign(mesh.num_faces(), true);
        for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
            if (!face_mask[fi]) {
                mu.admissible[fi] = false;
                continue;
            }
            const auto& f = mesh.faces[fi];
            mu.mu[fi] = face_mu_average(nu[f[0]], nu[f[1]], nu[f[2]]);
        }
        const PlanarEmbedding psi = solve_lbs_frames(mesh, frames, mu, pins, &face_mask, &transformed);
        std::vector<char> outside;
        std::vector<cplx> pre = pl_invert(mesh, planar, psi, queries, nullptr, &outside);
        // Queries that land outside the solved image sit in the far field,
        // where eta is the identity: invert the explicit factor instead of
        // snapping to the image boundary.
        for (std::size_t i = 0; i < pre.size(); ++i)
            if (outside[i] || std::abs(queries[i]) >= far_query_radius)
                pre[i] = factor.invert(queries[i]);

        inverse.pos.assign(mesh.num_vertices(), cplx{0, 0});
        inverse.infinity_vertex = planar.infinity_vertex;
        for (std::size_t i = 0; i < pre.size(); ++i) inverse.pos[query_vertex[i]] = pre[i];
        sample = inverse;
    }

    QcComposition out;
    out.psi_inverse = inverse;
    out.positions.resize(mesh.num_vertices());
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (planar.is_infinite(static_cast<int>(v)))
            out.positions[v] = Vec3{0, 0, r.c};
        else
            out.positions[v] =
                inv_ellip_stereographic(ComplexPoint(inverse.pos[v]), r, Pole::North);
    }
    return out;
}

namespace {

PlanarEmbedding apply_alignment(const TriMesh& mesh, const SphericalInit& init,
                                const ResolvedPoles& poles, const MobiusAlignment& m) {
    PlanarEmbedding aligned;
    aligned.pos.resize(mesh.num_vertices());
    aligned.infinity_vertex = poles.north_vertex;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (static_cast<int>(v) == poles.north_vertex) continue;
        const ComplexPoint w = mobius_align(ComplexPoint(init.planar.pos[v]), m);
        if (!w.is_finite()) throw std::runtime_error("alignment sent a non-pole vertex to infinity");
        aligned.pos[v] = w.value;
    }
    return aligned;
}

// The per-vertex Mobius can fold triangles squeezed against the new poles.
// Conformally re-solve the neighborhood of the chart origin against the
// mesh's intrinsic frames, keeping the outer vertices (and the origin vertex
// itself) pinned. fraction selects the innermost share of vertices to relax.
PlanarEmbedding chart_origin_correction(const TriMesh& mesh, const PlanarEmbedding& chart,
                                        int origin_vertex, double fraction) {
    const std::size_t n = chart.size();
    std::vector<double> finite_radii;
    finite_radii.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        if (!chart.is_infinite(static_cast<int>(v)))
            finite_radii.push_back(std::abs(chart.pos[v]));
    std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(finite_radii.size()));
    k = std::min(std::max<std::size_t>(k, 1), finite_radii.size() - 4);
    std::nth_element(finite_radii.begin(), finite_radii.begin() + static_cast<std::ptrdiff_t>(k),
                     finite_radii.end());
    const double threshold = finite_radii[k];

    ConstraintSet constraints;
    for (std::size_t v = 0; v < n; ++v) {
        if (chart.is_infinite(static_cast<int>(v)) || static_cast<int>(v) == origin_vertex)
            continue;
        if (std::abs(chart.pos[v]) >= threshold)
            constraints.pins.push_back({static_cast<int>(v), chart.pos[v]});
    }
    if (origin_vertex >= 0) constraints.pins.push_back({origin_vertex, cplx{0, 0}});

    std::vector<bool> mask(mesh.num_faces(), true);
    if (chart.infinity_vertex >= 0)
        for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi)
            for (int v : mesh.faces[fi])
                if (v == chart.infinity_vertex) mask[fi] = false;

    FaceFrames frames = frames_from_surface(mesh);
    BeltramiField zero;
    zero.mu.assign(mesh.num_faces(), cplx{0, 0});
    zero.admissible.assign(mesh.num_faces(), true);
    PlanarEmbedding out = solve_lbs_frames(mesh, frames, zero, constraints, &mask, &chart);
    out.infinity_vertex = chart.infinity_vertex;
    return out;
}

// Repair both pole neighborhoods of the aligned embedding: the south vertex
// sits at the origin of the current chart, the north vertex at the origin of
// the reciprocal chart.
PlanarEmbedding pole_region_correction(const TriMesh& mesh, const PlanarEmbedding& aligned,
                                       const ResolvedPoles& poles, double fraction) {
    PlanarEmbedding south_fixed =
        chart_origin_correction(mesh, aligned, poles.south_vertex, fraction);

    PlanarEmbedding reciprocal;
    reciprocal.pos.assign(mesh.num_vertices(), cplx{0, 0});
    reciprocal.infinity_vertex = poles.south_vertex;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (static_cast<int>(v) == poles.south_vertex) continue;
        if (static_cast<int>(v) == poles.north_vertex) continue;  // stays at the origin
        reciprocal.pos[v] = 1.0 / south_fixed.pos[v];
    }
    PlanarEmbedding north_fixed =
        chart_origin_correction(mesh, reciprocal, poles.north_vertex, fraction);

    PlanarEmbedding out = south_fixed;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (static_cast<int>(v) == poles.south_vertex || static_cast<int>(v) == poles.north_vertex)
            continue;
        out.pos[v] = 1.0 / north_fixed.pos[v];
    }
    out.pos[poles.south_vertex] = cplx{0, 0};
    out.infinity_vertex = poles.north_vertex;
    return out;
}

// Perimeter of the polygon opposite `center` across all its incident faces:
// the natural finite stand-in for the polar triangle's image when the pole is
// a vertex of the mesh. The north polygon is measured in the current chart,
// the south polygon through the pole swap z -> z/|z|^2.
double pole_ring_perimeter(const TriMesh& mesh, const PlanarEmbedding& planar, int center,
                           bool swapped) {
    double per = 0.0;
    for (const auto& f : mesh.faces) {
        int idx = -1;
        for (int i = 0; i < 3; ++i)
            if (f[i] == center) idx = i;
        if (idx < 0) continue;
        cplx a = planar.pos[f[(idx + 1) % 3]];
        cplx b = planar.pos[f[(idx + 2) % 3]];
        if (planar.is_infinite(f[(idx + 1) % 3]) || planar.is_infinite(f[(idx + 2) % 3]))
            throw std::runtime_error("pole ring touches the infinity vertex");
        if (swapped) {
            if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
                throw std::runtime_error("pole ring touches the origin");
            a /= std::norm(a);
            b /= std::norm(b);
        }
        per += std::abs(b - a);
    }
    if (per <= 0.0) throw std::runtime_error("degenerate pole ring");
    return per;
}

}  // namespace

ParamResult fecm_from_init(const TriMesh& mesh, const SphericalInit& init,
                           const EllipsoidRadii& r, const PoleSpec& spec,
                           const FecmOptions& opts) {
    ParamResult result;
    result.radii = r;

    auto t0 = clock_type::now();
    const ResolvedPoles poles = resolve_pole_vertices(mesh, spec);
    const MobiusAlignment m = resolve_poles(mesh, init, poles);
    result.after_mobius = apply_alignment(mesh, init, poles, m);
    result.after_mobius =
        pole_region_correction(mesh, result.after_mobius, poles, opts.init.correction_fraction);
    result.report.timings.push_back({"mobius", seconds_since(t0)});

    t0 = clock_type::now();
    const double per_n =
        pole_ring_perimeter(mesh, result.after_mobius, poles.north_vertex, false);
    const double per_s =
        pole_ring_perimeter(mesh, result.after_mobius, poles.south_vertex, true);
    const double k = std::sqrt(per_n * per_s) / per_n;
    result.after_scale = result.after_mobius;
    for (auto& z : result.after_scale.pos) z *= k;
    result.report.timings.push_back({"balance", seconds_since(t0)});

    t0 = clock_type::now();
    QcComposition qc =
        qc_compose_to_ellipsoid(mesh, result.after_scale, r, opts.psi_fixed_point_refine);
    result.after_psi_inverse = std::move(qc.psi_inverse);
    result.positions = std::move(qc.positions);
    result.report.timings.push_back({"qc_composition", seconds_since(t0)});

    t0 = clock_type::now();
    StageTiming report_timing{"report", 0.0};
    auto timings = std::move(result.report.timings);
    result.report = make_report(mesh, result.positions, r);
    report_timing.seconds = seconds_since(t0);
    timings.push_back(report_timing);
    for (auto& t : result.report.timings) timings.push_back(t);
    result.report.timings = std::move(timings);
    return result;
}

ParamResult fecm(const TriMesh& mesh, const EllipsoidRadii& r, const PoleSpec& spec,
                 const FecmOptions& opts) {
    auto t0 = clock_type::now();
    const SphericalInit init = spherical_param(mesh, opts.init);
    StageTiming init_timing{"spherical_init", seconds_since(t0)};

    ParamResult result = fecm_from_init(mesh, init, r, spec, opts);
    result.report.timings.insert(result.report.timings.begin(), init_timing);
    return result;
}

EllipsoidRadii init_radii_bbox(const TriMesh& mesh) {
    Vec3 centroid;
    const Eigen::Matrix3d axes = pca_axes(mesh, &centroid);
    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& p : mesh.vertices) {
        const Eigen::Vector3d d(p.x - centroid.x, p.y - centroid.y, p.z - centroid.z);
        for (int k = 0; k < 3; ++k) {
            const double proj = axes.col(k).dot(d);
            lo[k] = std::min(lo[k], proj);
            hi[k] = std::max(hi[k], proj);
        }
    }
    std::array<double, 3> ext;
    double max_ext = 0.0;
    for (int k = 0; k < 3; ++k) {
        ext[k] = 0.5 * (hi[k] - lo[k]);
        max_ext = std::max(max_ext, ext[k]);
    }
    if (max_ext <= 0.0) throw std::runtime_error("degenerate mesh extents");
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        ext[k] = std::max(ext[k], 1e-6 * max_ext);
        sum += ext[k];
    }
    return EllipsoidRadii(3.0 * ext[0] / sum, 3.0 * ext[1] / sum, 3.0 * ext[2] / sum);
}

namespace {

struct FaceAreaTerms {
    double image_area = 0.0;
    std::array<double, 3> image_area_grad{};  // d(area)/d(a,b,c)
    double source_fraction = 0.0;
    bool valid = false;
};

std::vector<FaceAreaTerms> projection_area_terms(const TriMesh& mesh,
                                                 const PlanarEmbedding& stage,
                                                 const EllipsoidRadii& r) {
    std::vector<FaceAreaTerms> terms(mesh.num_faces());
    const double total_src = total_area(mesh);

    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        const auto& f = mesh.faces[fi];
        bool finite = true;
        for (int v : f)
            if (stage.is_infinite(v)) finite = false;
        if (!finite) continue;

        // Positions are linear in each radius: p = (2ax, 2by, c(n-1)) / (1+n).
        std::array<Vec3, 3> p, da, db, dc;
        for (int i = 0; i < 3; ++i) {
            const cplx z = stage.pos[f[i]];
            const double x = z.real(), y = z.imag();
            const double inv = 1.0 / (1.0 + x * x + y * y);
            p[i] = Vec3{2.0 * r.a * x * inv, 2.0 * r.b * y * inv,
                        r.c * (x * x + y * y - 1.0) * inv};
            da[i] = Vec3{2.0 * x * inv, 0.0, 0.0};
            db[i] = Vec3{0.0, 2.0 * y * inv, 0.0};
            dc[i] = Vec3{0.0, 0.0, (x * x + y * y - 1.0) * inv};
        }
        const Vec3 e1 = p[1] - p[0], e2 = p[2] - p[0];
        const Vec3 n = cross(e1, e2);
        const double nn = norm(n);
        const FaceGeometry src = face_geometry(mesh, static_cast<int>(fi));
        if (nn <= 0.0 || src.degenerate || src.area <= 0.0) continue;

        FaceAreaTerms& t = terms[fi];
        t.valid = true;
        t.image_area = 0.5 * nn;
        t.source_fraction = src.area / total_src;
        const std::array<const std::array<Vec3, 3>*, 3> grads = {&da, &db, &dc};
        for (int k = 0; k < 3; ++k) {
            const auto& g = *grads[k];
            const Vec3 dn = cross(g[1] - g[0], e2) + cross(e1, g[2] - g[0]);
            t.image_area_grad[k] = 0.5 * dot(n, dn) / nn;
        }
    }
    return terms;
}

}  // namespace

double energy_area(const TriMesh& mesh, const PlanarEmbedding& stage, const EllipsoidRadii& r) {
    const auto terms = projection_area_terms(mesh, stage, r);
    const double thomsen = ellipsoid_area(r);
    double sum = 0.0;
    long count = 0;
    for (const auto& t : terms) {
        if (!t.valid) continue;
        const double d = std::log(t.image_area / thomsen / t.source_fraction);
        sum += d * d;
        ++count;
    }
    if (count == 0) throw std::runtime_error("no valid face for the area energy");
    return sum / static_cast<double>(count);
}

std::array<double, 3> grad_E_area(const TriMesh& mesh, const PlanarEmbedding& stage,
                                  const EllipsoidRadii& r) {
    const auto terms = projection_area_terms(mesh, stage, r);
    const double thomsen = ellipsoid_area(r);
    const auto thomsen_grad = ellipsoid_area_grad(r);
    std::array<double, 3> grad{0, 0, 0};
    long count = 0;
    for (const auto& t : terms) {
        if (!t.valid) continue;
        const double d = std::log(t.image_area / thomsen / t.source_fraction);
        for (int k = 0; k < 3; ++k)
            grad[k] += 2.0 * d * (t.image_area_grad[k] / t.image_area - thomsen_grad[k] / thomsen);
        ++count;
    }
    if (count == 0) throw std::runtime_error("no valid face for the area energy");
    for (double& g : grad) g /= static_cast<double>(count);
    return grad;
}

std::pair<ParamResult, RadiiTrace> optimize_radii(const TriMesh& mesh, const PoleSpec& spec,
                                                  const OptimizeOptions& opts,
                                                  const FecmOptions& fecm_opts) {
    const SphericalInit init = spherical_param(mesh, fecm_opts.init);

    auto renormalize = [](std::array<double, 3> v) {
        double sum = 0.0;
        for (double& x : v) {
            x = std::max(x, 1e-3);
            sum += x;
        }
        return EllipsoidRadii(3.0 * v[0] / sum, 3.0 * v[1] / sum, 3.0 * v[2] / sum);
    };

    EllipsoidRadii r = opts.initial_radii ? *opts.initial_radii : init_radii_bbox(mesh);
    ParamResult result = fecm_from_init(mesh, init, r, spec, fecm_opts);
    double energy = energy_area(mesh, result.after_psi_inverse, r);

    RadiiTrace trace;
    trace.step_size = opts.gamma0;
    trace.steps.push_back({r, energy});

    // The analytic fixed-stage gradient treats the planar positions as
    // constants, but the post-k stages are re-solved whenever the radii
    // change, and on strongly anisotropic inputs the two disagree even in
    // sign. The descent direction therefore differentiates the full
    // re-solved energy by central differences; the analytic gradient remains
    // available as its own operation.
    const auto total_energy = [&](const EllipsoidRadii& rr) {
        ParamResult res = fecm_from_init(mesh, init, rr, spec, fecm_opts);
        return energy_area(mesh, res.after_psi_inverse, rr);
    };

    double gamma = opts.gamma0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const double h = 1e-3;
        std::array<double, 3> g{};
        for (int k = 0; k < 3; ++k) {
            std::array<double, 3> rp{r.a, r.b, r.c}, rm{r.a, r.b, r.c};
            rp[k] += h;
            rm[k] = std::max(rm[k] - h, 1e-3);
            g[k] = (total_energy(EllipsoidRadii(rp[0], rp[1], rp[2])) -
                    total_energy(EllipsoidRadii(rm[0], rm[1], rm[2]))) /
                   (rp[k] - rm[k]);
        }
        // Remove the null direction of the scale-invariant energy.
        const double mean_g = (g[0] + g[1] + g[2]) / 3.0;
        for (double& x : g) x -= mean_g;
        const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        if (g2 <= 1e-16) {
            trace.converged = true;
            break;
        }

        bool accepted = false;
        EllipsoidRadii r_new = r;
        ParamResult result_new;
        double energy_new = energy;
        double step = gamma;
        for (int back = 0; back < 25; ++back) {
            r_new = renormalize({r.a - step * g[0], r.b - step * g[1], r.c - step * g[2]});
            result_new = fecm_from_init(mesh, init, r_new, spec, fecm_opts);
            energy_new = energy_area(mesh, result_new.after_psi_inverse, r_new);
            if (energy_new <= energy - 1e-4 * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            trace.converged = true;
            break;
        }

        const double drop = energy - energy_new;
        r = r_new;
        result = std::move(result_new);
        energy = energy_new;
        gamma = std::min(step * 2.0, opts.gamma0);
        trace.steps.push_back({r, energy});
        trace.step_size = step;
        if (drop <= opts.tol * std::max(1.0, std::abs(energy))) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(result), std::move(trace)};
}

}  // namespace ellipara
