#pragma once
#include <string>
#include <vector>

#include "ellipara/fecm.hpp"
#include "ellipara/lbs.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Landmark-constrained ellipsoidal quasi-conformal parameterization.
// ---------------------------------------------------------------------------

struct LandmarkSet {
    struct Pair {
        int vertex;   // index on the source mesh
        Vec3 target;  // point on E_{a,b,c}
    };
    std::vector<Pair> pairs;
    double lambda = 1.0;
};

// CSV lines `vertex_index,qx,qy,qz` (0-based); targets validated against the
// ellipsoid equation within 1e-6 when radii are supplied.
LandmarkSet load_landmarks(const std::string& path, double lambda,
                           const EllipsoidRadii* validate_against = nullptr);

// Planar targets q~ = P^N_{a,b,c}(q). Throws if a target sits at the north
// pole (reserved puncture).
std::vector<cplx> lift_landmarks(const LandmarkSet& landmarks, const EllipsoidRadii& r);

struct FeqcmOptions {
    FecmOptions fecm;
    double bijectivity_bound = 0.95;
    int max_rounds = 10;
    bool recompute_targets_via_psi = false;  // second pass with targets psi(q~)
};

struct BijectivityResult {
    PlanarEmbedding map;
    int rounds = 0;
    int remaining_flips = 0;
    bool success = true;
};

// Iteratively truncate the measured mu and re-solve with the LBS until every
// face is orientation-preserving with |mu| <= bound, re-imposing landmark
// constraints each round.
BijectivityResult enforce_bijectivity(const TriMesh& mesh, const PlanarEmbedding& domain,
                                      const PlanarEmbedding& map,
                                      const ConstraintSet& constraints, double bound,
                                      int max_rounds);

struct FeqcmResult {
    ParamResult param;
    int enforcement_rounds = 0;
    bool bijective = true;
};

FeqcmResult feqcm(const TriMesh& mesh, const EllipsoidRadii& r, const PoleSpec& spec,
                  const LandmarkSet& landmarks, const FeqcmOptions& opts = {});

}  // namespace ellipara
