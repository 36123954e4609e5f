#pragma once
#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include "ellipara/mesh.hpp"
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Linear Beltrami Solver: piecewise-linear FEM discretization of
// div(A grad u) = 0 with per-face constant A derived from mu, plus the
// landmark-weighted harmonic solve.
// ---------------------------------------------------------------------------

struct FaceCoefficients {
    std::vector<std::array<double, 3>> alpha;  // (a1, a2, a3) per face
};

struct Constraint {
    int vertex;
    cplx target;
};

struct ConstraintSet {
    std::vector<Constraint> pins;       // satisfied exactly
    std::vector<Constraint> landmarks;  // soft, weighted by lambda
    double lambda = 0.0;
};

// Coefficients of A = [[a1,a2],[a2,a3]] from mu = rho + i tau.
// Throws "non-admissible coefficient" when |mu| >= 1 - eps_clamp.
std::array<double, 3> alpha_from_mu(cplx mu, double eps_clamp = 1e-8);

FaceCoefficients alpha_from_mu(const BeltramiField& field, double eps_clamp = 1e-8);

// Per-face domain frames. For a planar domain these are the actual vertex
// coordinates; for a surface domain, the isometric flattening of each face.
using FaceFrames = std::vector<std::array<cplx, 3>>;

FaceFrames frames_from_embedding(const TriMesh& mesh, const PlanarEmbedding& domain);
FaceFrames frames_from_surface(const TriMesh& mesh);

// Energy-form stiffness matrix: K_ij = sum_T Area(T) grad(phi_i)^T A_T grad(phi_j).
// Symmetric PSD, interior row sums zero. Faces with mask[f] == false are
// skipped. Throws on degenerate domain faces, naming the face.
Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh,
                                               const FaceFrames& frames,
                                               const FaceCoefficients& coeffs,
                                               const std::vector<bool>* face_mask = nullptr);

// Solve the two decoupled real systems (one factorization) for a planar map
// with the prescribed per-face mu and the given constraints. Faces touching
// the domain's infinity vertex are excluded automatically.
PlanarEmbedding solve_lbs(const TriMesh& mesh, const PlanarEmbedding& domain,
                          const BeltramiField& mu, const ConstraintSet& constraints);

// Same solve with explicit frames/mask (used when the domain is the surface
// itself rather than a planar embedding).
PlanarEmbedding solve_lbs_frames(const TriMesh& mesh, const FaceFrames& frames,
                                 const BeltramiField& mu, const ConstraintSet& constraints,
                                 const std::vector<bool>* face_mask = nullptr,
                                 const PlanarEmbedding* initial = nullptr);

// Minimizer of int |grad phi|^2 + lambda sum |phi(p_i) - q_i|^2 over the
// given planar domain (cotangent weights, A = identity).
PlanarEmbedding solve_landmark_harmonic(const TriMesh& mesh, const PlanarEmbedding& domain,
                                        const ConstraintSet& constraints);

}  // namespace ellipara
