#pragma once
#include "ellipara/mesh.hpp"
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Spherical conformal initialization, realized entirely on the plane:
// regular-face selection, big-triangle harmonic flattening, pole-swap
// inversion, and quasi-conformal correction of the squeezed region.
// ---------------------------------------------------------------------------

struct SphericalInit {
    PlanarEmbedding planar;  // the north-plane map; deleted face = outer triangle
    int north_face = -1;     // deleted "most regular" face (covers infinity)
    int south_face = -1;     // face whose planar image strictly contains the origin
};

struct SphericalInitOptions {
    double correction_fraction = 0.5;  // innermost vertex fraction re-solved
};

// Argmax of face_regularity; ties broken by smallest index; faces with
// regularity below 1e-6 excluded.
int select_polar_face(const TriMesh& mesh);

// Harmonic flattening of the mesh punctured at `deleted`, with the deleted
// face's vertices pinned to a congruent planar triangle. Translated so the
// origin sits at the centroid of the innermost face.
PlanarEmbedding harmonic_flatten(const TriMesh& mesh, int deleted);

// Vertex-wise z/|z|^2. Vertices at the origin are perturbed by
// 1e-12 * diameter with a warning.
PlanarEmbedding invert_to_south(const PlanarEmbedding& planar);

// Conformal re-solve of the innermost `fraction` of vertices of the inverted
// embedding against the mesh's intrinsic frames; the rest hard-pinned.
PlanarEmbedding south_correction(const TriMesh& mesh, const PlanarEmbedding& inverted,
                                 int south_plane_outer_face, double fraction);

// Full initialization pipeline. Throws if the mesh is not genus-0 closed.
SphericalInit spherical_param(const TriMesh& mesh,
                              const SphericalInitOptions& opts = {});

// Lift a north-plane embedding to the unit sphere.
std::vector<Vec3> lift_to_sphere(const PlanarEmbedding& planar);

// Face of `mesh` whose image under `planar` strictly contains the origin;
// -1 if none.
int face_containing_origin(const TriMesh& mesh, const PlanarEmbedding& planar);

}  // namespace ellipara
