#include "ellipara/lbs.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ellipara {

std::array<double, 3> alpha_from_mu(cplx mu, double eps_clamp) {
    const double rho = mu.real(), tau = mu.imag();
    const double n2 = rho * rho + tau * tau;
    if (std::sqrt(n2) >= 1.0 - eps_clamp)
        throw std::invalid_argument("non-admissible coefficient: |mu| >= 1 - eps");
    const double d = 1.0 - n2;
    return {((rho - 1.0) * (rho - 1.0) + tau * tau) / d,
            -2.0 * tau / d,
            (1.0 + 2.0 * rho + rho * rho + tau * tau) / d};
}

FaceCoefficients alpha_from_mu(const BeltramiField& field, double eps_clamp) {
    FaceCoefficients c;
    c.alpha.reserve(field.size());
    for (const auto& mu : field.mu) c.alpha.push_back(alpha_from_mu(mu, eps_clamp));
    return c;
}

FaceFrames frames_from_embedding(const TriMesh& mesh, const PlanarEmbedding& domain) {
    FaceFrames frames(mesh.num_faces());
    for (std::size_t i = 0; i < mesh.num_faces(); ++i) {
        const auto& f = mesh.faces[i];
        bool inf = false;
        for (int v : f)
            if (domain.is_infinite(v)) inf = true;
        if (inf) continue;  // left zero; caller must mask these faces
        frames[i] = {domain.pos[f[0]], domain.pos[f[1]], domain.pos[f[2]]};
    }
    return frames;
}

FaceFrames frames_from_surface(const TriMesh& mesh) {
    FaceFrames frames(mesh.num_faces());
    for (std::size_t i = 0; i < mesh.num_faces(); ++i) {
        const auto& f = mesh.faces[i];
        frames[i] = flatten_triangle(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    }
    return frames;
}

namespace {

// rot90(x, y) = (-y, x)
inline std::array<double, 2> rot90(cplx v) { return {-v.imag(), v.real()}; }

inline double quad(const std::array<double, 2>& u, const std::array<double, 3>& alpha,
                   const std::array<double, 2>& v) {
    return alpha[0] * u[0] * v[0] + alpha[1] * (u[0] * v[1] + u[1] * v[0]) +
           alpha[2] * u[1] * v[1];
}

}  // namespace

Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh, const FaceFrames& frames,
                                               const FaceCoefficients& coeffs,
                                               const std::vector<bool>* face_mask) {
    const int n = static_cast<int>(mesh.num_vertices());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.num_faces() * 9);

    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        if (face_mask && !(*face_mask)[fi]) continue;
        const auto& f = mesh.faces[fi];
        const auto& z = frames[fi];
        const cplx d1 = z[1] - z[0], d2 = z[2] - z[0];
        // signed doubled area = Im(conj(d1) * d2); orientation handled via |.|
        const double abs2a = std::abs((std::conj(d1) * d2).imag());
        const double scale = std::norm(d1) + std::norm(d2);
        if (abs2a <= 1e-14 * scale || scale <= 0.0)
            throw std::runtime_error("degenerate domain face " + std::to_string(fi));

        // Edge opposite each corner, cyclic order.
        const std::array<cplx, 3> opp = {z[2] - z[1], z[0] - z[2], z[1] - z[0]};
        const auto& alpha = coeffs.alpha[fi];
        const double inv = 1.0 / (2.0 * abs2a);  // = 1/(4*|Area|)
        for (int i = 0; i < 3; ++i) {
            const auto gi = rot90(opp[i]);
            for (int j = 0; j < 3; ++j) {
                const auto gj = rot90(opp[j]);
                triplets.emplace_back(f[i], f[j], quad(gi, alpha, gj) * inv);
            }
        }
    }

    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(triplets.begin(), triplets.end());
    return K;
}

namespace {

PlanarEmbedding solve_system(const TriMesh& mesh, const FaceFrames& frames,
                             const FaceCoefficients& coeffs, const ConstraintSet& constraints,
                             const std::vector<bool>* face_mask, const PlanarEmbedding* initial,
                             int infinity_vertex) {
    const int n = static_cast<int>(mesh.num_vertices());

    if (constraints.pins.empty() &&
        (constraints.landmarks.empty() || constraints.lambda <= 0.0))
        throw std::runtime_error("singular system: no constraints");

    std::vector<char> pinned(n, 0);
    std::vector<cplx> pin_value(n, cplx{0, 0});
    for (const auto& p : constraints.pins) {
        pinned[p.vertex] = 1;
        pin_value[p.vertex] = p.target;
    }

    // Vertices referenced by at least one assembled face.
    std::vector<char> in_system(n, 0);
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        if (face_mask && !(*face_mask)[fi]) continue;
        for (int v : mesh.faces[fi]) in_system[v] = 1;
    }

    std::vector<int> free_index(n, -1);
    int n_free = 0;
    for (int v = 0; v < n; ++v)
        if (in_system[v] && !pinned[v]) free_index[v] = n_free++;

    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh, frames, coeffs, face_mask);

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n_free, 2);
    for (int col = 0; col < K.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (free_index[i] < 0) continue;
            if (free_index[j] >= 0) {
                trip.emplace_back(free_index[i], free_index[j], it.value());
            } else if (pinned[j]) {
                rhs(free_index[i], 0) -= it.value() * pin_value[j].real();
                rhs(free_index[i], 1) -= it.value() * pin_value[j].imag();
            }
        }
    }
    if (constraints.lambda > 0.0) {
        for (const auto& lm : constraints.landmarks) {
            const int fi = free_index[lm.vertex];
            if (fi < 0) continue;  // pinned landmarks already exact
            trip.emplace_back(fi, fi, constraints.lambda);
            rhs(fi, 0) += constraints.lambda * lm.target.real();
            rhs(fi, 1) += constraints.lambda * lm.target.imag();
        }
    }

    Eigen::SparseMatrix<double> A(n_free, n_free);
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw std::runtime_error("singular system");
    Eigen::MatrixX2d x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw std::runtime_error("singular system");

    PlanarEmbedding out;
    out.infinity_vertex = infinity_vertex;
    out.pos.resize(n);
    for (int v = 0; v < n; ++v) {
        if (pinned[v]) {
            out.pos[v] = pin_value[v];
        } else if (free_index[v] >= 0) {
            out.pos[v] = cplx(x(free_index[v], 0), x(free_index[v], 1));
        } else if (initial && v != infinity_vertex) {
            out.pos[v] = initial->pos[v];
        } else {
            out.pos[v] = cplx{0, 0};
        }
    }
    return out;
}

}  // namespace

PlanarEmbedding solve_lbs(const TriMesh& mesh, const PlanarEmbedding& domain,
                          const BeltramiField& mu, const ConstraintSet& constraints) {
    std::vector<bool> mask(mesh.num_faces(), true);
    if (domain.infinity_vertex >= 0) {
        for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi)
            for (int v : mesh.faces[fi])
                if (domain.is_infinite(v)) mask[fi] = false;
    }
    FaceCoefficients coeffs;
    coeffs.alpha.resize(mesh.num_faces(), {1.0, 0.0, 1.0});
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi)
        if (mask[fi]) coeffs.alpha[fi] = alpha_from_mu(mu.mu[fi]);

    FaceFrames frames = frames_from_embedding(mesh, domain);
    return solve_system(mesh, frames, coeffs, constraints, &mask, &domain,
                        domain.infinity_vertex);
}

PlanarEmbedding solve_lbs_frames(const TriMesh& mesh, const FaceFrames& frames,
                                 const BeltramiField& mu, const ConstraintSet& constraints,
                                 const std::vector<bool>* face_mask,
                                 const PlanarEmbedding* initial) {
    FaceCoefficients coeffs;
    coeffs.alpha.resize(mesh.num_faces(), {1.0, 0.0, 1.0});
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi)
        if (!face_mask || (*face_mask)[fi]) coeffs.alpha[fi] = alpha_from_mu(mu.mu[fi]);
    return solve_system(mesh, frames, coeffs, constraints, face_mask, initial,
                        initial ? initial->infinity_vertex : -1);
}

PlanarEmbedding solve_landmark_harmonic(const TriMesh& mesh, const PlanarEmbedding& domain,
                                        const ConstraintSet& constraints) {
    BeltramiField zero;
    zero.mu.assign(mesh.num_faces(), cplx{0, 0});
    zero.admissible.assign(mesh.num_faces(), true);
    return solve_lbs(mesh, domain, zero, constraints);
}

}  // namespace ellipara
