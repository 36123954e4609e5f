#include "ellipara/beltrami.hpp"

#include <cmath>
#include <stdexcept>

namespace ellipara {

FaceDerivatives face_derivatives(const std::array<cplx, 3>& domain,
                                 const std::array<cplx, 3>& image) {
    const cplx d1 = domain[1] - domain[0];
    const cplx d2 = domain[2] - domain[0];
    const cplx e1 = image[1] - image[0];
    const cplx e2 = image[2] - image[0];

    const cplx det = d1 * std::conj(d2) - d2 * std::conj(d1);
    const double scale = std::norm(d1) + std::norm(d2);
    FaceDerivatives d;
    if (scale <= 0.0 || std::abs(det) <= 1e-14 * scale) {
        d.degenerate = true;
        return d;
    }
    d.fz = (e1 * std::conj(d2) - e2 * std::conj(d1)) / det;
    d.fzbar = (d1 * e2 - d2 * e1) / det;
    return d;
}

namespace {

// Large-but-finite sentinel for anti-conformal faces (|f_z| = 0) so the
// phase information survives truncation.
constexpr double kMuSentinel = 1e18;

void push_mu(BeltramiField& field, const FaceDerivatives& d) {
    if (d.degenerate) {
        field.mu.push_back({0.0, 0.0});
        field.admissible.push_back(false);
        return;
    }
    const double na = std::abs(d.fz);
    const double nb = std::abs(d.fzbar);
    if (na <= nb) {
        // Orientation-reversing or degenerate map on this face.
        cplx mu = (na > 0.0) ? d.fzbar / d.fz
                             : ((nb > 0.0) ? kMuSentinel * (d.fzbar / nb) : cplx{0.0, 0.0});
        field.mu.push_back(mu);
        field.admissible.push_back(false);
        return;
    }
    field.mu.push_back(d.fzbar / d.fz);
    field.admissible.push_back(true);
}

}  // namespace

BeltramiField mu_planar_faces(const TriMesh& mesh, const PlanarEmbedding& domain,
                              const PlanarEmbedding& image) {
    BeltramiField field;
    field.mu.reserve(mesh.num_faces());
    field.admissible.reserve(mesh.num_faces());
    for (const auto& f : mesh.faces) {
        bool touches_inf = false;
        for (int v : f)
            if (domain.is_infinite(v) || image.is_infinite(v)) touches_inf = true;
        if (touches_inf) {
            field.mu.push_back({0.0, 0.0});
            field.admissible.push_back(false);
            continue;
        }
        push_mu(field, face_derivatives({domain.pos[f[0]], domain.pos[f[1]], domain.pos[f[2]]},
                                        {image.pos[f[0]], image.pos[f[1]], image.pos[f[2]]}));
    }
    return field;
}

BeltramiField mu_surface_map(const TriMesh& mesh, const std::vector<Vec3>& domain,
                             const std::vector<Vec3>& image) {
    BeltramiField field;
    field.mu.reserve(mesh.num_faces());
    field.admissible.reserve(mesh.num_faces());
    for (const auto& f : mesh.faces) {
        auto zd = flatten_triangle(domain[f[0]], domain[f[1]], domain[f[2]]);
        auto zi = flatten_triangle(image[f[0]], image[f[1]], image[f[2]]);
        push_mu(field, face_derivatives(zd, zi));
    }
    return field;
}

BeltramiField mu_surface_to_plane(const TriMesh& mesh, const std::vector<Vec3>& domain,
                                  const PlanarEmbedding& image) {
    BeltramiField field;
    field.mu.reserve(mesh.num_faces());
    field.admissible.reserve(mesh.num_faces());
    for (const auto& f : mesh.faces) {
        bool touches_inf = false;
        for (int v : f)
            if (image.is_infinite(v)) touches_inf = true;
        if (touches_inf) {
            field.mu.push_back({0.0, 0.0});
            field.admissible.push_back(false);
            continue;
        }
        auto zd = flatten_triangle(domain[f[0]], domain[f[1]], domain[f[2]]);
        push_mu(field, face_derivatives(zd, {image.pos[f[0]], image.pos[f[1]], image.pos[f[2]]}));
    }
    return field;
}

cplx compose_mu(cplx mu_f, cplx fz, cplx mu_g_of_f) {
    if (std::abs(fz) <= 0.0) throw std::invalid_argument("compose_mu: f_z vanishes");
    const cplx phase = std::conj(fz) / fz;
    const cplx denom = 1.0 + phase * std::conj(mu_f) * mu_g_of_f;
    if (std::abs(denom) < 1e-12) throw std::runtime_error("composition blow-up");
    return (mu_f + phase * mu_g_of_f) / denom;
}

double dilatation(cplx mu) {
    const double m = std::abs(mu);
    if (m >= 1.0) throw std::invalid_argument("dilatation requires |mu| < 1");
    return (1.0 + m) / (1.0 - m);
}

std::vector<int> jacobian_sign(const TriMesh& mesh, const PlanarEmbedding& domain,
                               const PlanarEmbedding& image) {
    std::vector<int> signs(mesh.num_faces(), 0);
    for (std::size_t i = 0; i < mesh.num_faces(); ++i) {
        const auto& f = mesh.faces[i];
        bool touches_inf = false;
        for (int v : f)
            if (domain.is_infinite(v) || image.is_infinite(v)) touches_inf = true;
        if (touches_inf) continue;
        auto d = face_derivatives({domain.pos[f[0]], domain.pos[f[1]], domain.pos[f[2]]},
                                  {image.pos[f[0]], image.pos[f[1]], image.pos[f[2]]});
        if (d.degenerate) continue;
        const double j = std::norm(d.fz) - std::norm(d.fzbar);
        signs[i] = (j > 0.0) - (j < 0.0);
    }
    return signs;
}

BeltramiField truncate_mu(const BeltramiField& field, double bound) {
    if (bound <= 0.0 || bound >= 1.0)
        throw std::invalid_argument("truncation bound must lie in (0,1)");
    BeltramiField out = field;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = std::abs(out.mu[i]);
        if (!std::isfinite(m) || m == 0.0) {
            if (!out.admissible[i] || !std::isfinite(m)) out.mu[i] = {0.0, 0.0};
        } else if (m > bound) {
            out.mu[i] *= bound / m;
        }
        out.admissible[i] = true;
    }
    return out;
}

int count_foldovers(const TriMesh& mesh, const std::vector<Vec3>& param,
                    const EllipsoidRadii& r) {
    int count = 0;
    for (const auto& f : mesh.faces) {
        const Vec3& p0 = param[f[0]];
        const Vec3& p1 = param[f[1]];
        const Vec3& p2 = param[f[2]];
        const Vec3 n = cross(p1 - p0, p2 - p0);
        const Vec3 centroid = (p0 + p1 + p2) / 3.0;
        if (dot(n, r.outward_normal(centroid)) <= 0.0) ++count;
    }
    return count;
}

double mean_abs_mu(const BeltramiField& field) {
    if (field.mu.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& m : field.mu) sum += std::min(std::abs(m), 1.0);
    return sum / static_cast<double>(field.mu.size());
}

}  // namespace ellipara
