#pragma once
#include <optional>
#include <vector>

#include "ellipara/mesh.hpp"
#include "ellipara/metrics.hpp"
#include "ellipara/projections.hpp"
#include "ellipara/spherical_init.hpp"
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Ellipsoidal conformal parameterization: Mobius pole alignment, balancing
// scale, quasi-conformal composition onto the ellipsoid, and the
// elliptic-radii optimizer.
// ---------------------------------------------------------------------------

struct PoleSpec {
    // -1 means auto (PCA extremal vertices: first axis -> poles, second ->
    // alignment).
    int north_vertex = -1;
    int south_vertex = -1;
    int align_vertex = -1;
};

struct ResolvedPoles {
    int north_vertex, south_vertex, align_vertex;
};

struct ParamResult {
    std::vector<Vec3> positions;
    EllipsoidRadii radii;
    PlanarEmbedding after_mobius;
    PlanarEmbedding after_scale;
    PlanarEmbedding after_psi_inverse;
    DistortionReport report;
};

struct RadiiTrace {
    struct Step {
        EllipsoidRadii radii;
        double energy;
    };
    std::vector<Step> steps;
    double step_size = 0.0;
    bool converged = false;
};

struct FecmOptions {
    SphericalInitOptions init;
    bool psi_fixed_point_refine = false;  // one extra mu re-solve at inverted positions
};

struct OptimizeOptions {
    double gamma0 = 0.1;
    int max_iters = 50;
    double tol = 1e-4;  // relative energy change
    // Starting radii; when unset, the normalized bounding-box extents are
    // used. Note the bounding-box axes are ordered by decreasing extent and
    // need not line up with the chart axes fixed by the pole selection.
    std::optional<EllipsoidRadii> initial_radii;
};

ResolvedPoles resolve_pole_vertices(const TriMesh& mesh, const PoleSpec& spec);
MobiusAlignment resolve_poles(const TriMesh& mesh, const SphericalInit& init,
                              const ResolvedPoles& poles);

// k = sqrt(Per(T_N) * Per(pole_swap(T_S))) / Per(T_N), the scale that
// equalizes the perimeters of the two polar triangles' images.
double balance_scale(const TriMesh& mesh, const PlanarEmbedding& planar,
                     int north_face, int south_face);

// Positions on E_{a,b,c} via psi = LBS(mu of the inverse ellipsoidal
// projection) and grid-accelerated inversion of psi at the vertex positions.
struct QcComposition {
    std::vector<Vec3> positions;
    PlanarEmbedding psi_inverse;  // psi^{-1} at the vertices, pre-projection
};

// pin_vertices (typically the outer triangle's and the south face's corners)
// are held fixed through the psi solve; when null, the infinity vertex's
// one-ring is pinned instead.
QcComposition qc_compose_to_ellipsoid(const TriMesh& mesh, const PlanarEmbedding& planar,
                                      const EllipsoidRadii& r, bool fixed_point_refine = false,
                                      const std::vector<int>* pin_vertices = nullptr);

// PL inverse evaluation: locate each query in the image triangulation and
// return barycentric pre-images. Queries outside snap to the nearest face
// with a warning counter.
std::vector<cplx> pl_invert(const TriMesh& mesh, const PlanarEmbedding& map_domain,
                            const PlanarEmbedding& map_image,
                            const std::vector<cplx>& queries,
                            int* outside_count = nullptr,
                            std::vector<char>* outside_flags = nullptr);

ParamResult fecm(const TriMesh& mesh, const EllipsoidRadii& r, const PoleSpec& spec,
                 const FecmOptions& opts = {});

// Variant reusing a precomputed spherical initialization (radii optimizer).
ParamResult fecm_from_init(const TriMesh& mesh, const SphericalInit& init,
                           const EllipsoidRadii& r, const PoleSpec& spec,
                           const FecmOptions& opts = {});

// Bounding-box radii after zero-centering + PCA alignment; a0+b0+c0 = 3.
EllipsoidRadii init_radii_bbox(const TriMesh& mesh);

// Area distortion energy of the final projection stage, holding the planar
// stage fixed, and its analytic radii gradient.
double energy_area(const TriMesh& mesh, const PlanarEmbedding& stage, const EllipsoidRadii& r);
std::array<double, 3> grad_E_area(const TriMesh& mesh, const PlanarEmbedding& stage,
                                  const EllipsoidRadii& r);

std::pair<ParamResult, RadiiTrace> optimize_radii(const TriMesh& mesh, const PoleSpec& spec,
                                                  const OptimizeOptions& opts = {},
                                                  const FecmOptions& fecm_opts = {});

}  // namespace ellipara
