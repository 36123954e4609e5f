#pragma once
#include "ellipara/mesh.hpp"
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Per-face Beltrami coefficients of piecewise-linear maps, composition,
// dilatation, truncation, fold-over detection. All per-face and pure.
// ---------------------------------------------------------------------------

// Complex derivatives of the unique linear extension on one triangle:
// f(z) = A z + B conj(z) + C with f(domain[i]) = image[i].
struct FaceDerivatives {
    cplx fz;      // A
    cplx fzbar;   // B
    bool degenerate = false;
};

FaceDerivatives face_derivatives(const std::array<cplx, 3>& domain,
                                 const std::array<cplx, 3>& image);

// mu = B/A per face for a planar-to-planar PL map. Faces touching the
// infinity vertex of either embedding are flagged inadmissible with mu = 0.
BeltramiField mu_planar_faces(const TriMesh& mesh, const PlanarEmbedding& domain,
                              const PlanarEmbedding& image);

// mu per face between two 3D configurations (or 3D -> plane), measured in
// isometric per-face frames; frame-independent.
BeltramiField mu_surface_map(const TriMesh& mesh, const std::vector<Vec3>& domain,
                             const std::vector<Vec3>& image);
BeltramiField mu_surface_to_plane(const TriMesh& mesh, const std::vector<Vec3>& domain,
                                  const PlanarEmbedding& image);

// Composition formula: mu_{g o f} from mu_f, the phase of f_z, and mu_g o f.
// Throws on denominator blow-up (magnitude < 1e-12).
cplx compose_mu(cplx mu_f, cplx fz, cplx mu_g_of_f);

// (1+|mu|)/(1-|mu|); requires |mu| < 1.
double dilatation(cplx mu);

// Sign of the PL Jacobian per face (planar image); 0 for degenerate faces.
std::vector<int> jacobian_sign(const TriMesh& mesh, const PlanarEmbedding& domain,
                               const PlanarEmbedding& image);

// Clamp |mu| to the bound; phases kept, inadmissible faces with undefined
// phase are set to 0. Output is admissible everywhere.
BeltramiField truncate_mu(const BeltramiField& field, double bound);

// Number of faces whose image normal points into the ellipsoid.
int count_foldovers(const TriMesh& mesh, const std::vector<Vec3>& param,
                    const EllipsoidRadii& r);

double mean_abs_mu(const BeltramiField& field);

}  // namespace ellipara
