#include "ellipara/feqcm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ellipara/beltrami.hpp"
#include "ellipara/metrics.hpp"
#include "ellipara/projections.hpp"

namespace ellipara {

LandmarkSet load_landmarks(const std::string& path, double lambda,
                           const EllipsoidRadii* validate_against) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open landmark file");

    LandmarkSet set;
    set.lambda = lambda;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        std::istringstream ss(line);
        LandmarkSet::Pair pair;
        char comma;
        if (!(ss >> pair.vertex >> comma >> pair.target.x >> comma >> pair.target.y >> comma >>
              pair.target.z))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected `vertex,qx,qy,qz`");
        if (pair.vertex < 0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": negative vertex index");
        if (validate_against && std::abs(validate_against->residual(pair.target)) > 1e-6)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": target is not on the ellipsoid");
        set.pairs.push_back(pair);
    }
    return set;
}

std::vector<cplx> lift_landmarks(const LandmarkSet& landmarks, const EllipsoidRadii& r) {
    std::vector<cplx> lifted;
    lifted.reserve(landmarks.pairs.size());
    for (const auto& pair : landmarks.pairs) {
        const ComplexPoint q = ellip_stereographic(pair.target, r, Pole::North);
        if (!q.is_finite())
            throw std::runtime_error("landmark target sits at the north pole");
        lifted.push_back(q.value);
    }
    return lifted;
}

namespace {

// Flip/excess census of a candidate map, ignoring faces at the puncture.
struct MuCensus {
    BeltramiField mu;
    int flips = 0;
    double max_abs = 0.0;
};

MuCensus census(const TriMesh& mesh, const PlanarEmbedding& domain, const PlanarEmbedding& map) {
    MuCensus c;
    c.mu = mu_planar_faces(mesh, domain, map);
    const std::vector<int> signs = jacobian_sign(mesh, domain, map);
    for (std::size_t fi = 0; fi < mesh.num_faces(); ++fi) {
        bool at_puncture = false;
        for (int v : mesh.faces[fi])
            if (domain.is_infinite(v) || map.is_infinite(v)) at_puncture = true;
        if (at_puncture) continue;
        if (signs[fi] <= 0 || !c.mu.admissible[fi]) {
            ++c.flips;
        } else {
            c.max_abs = std::max(c.max_abs, std::abs(c.mu.mu[fi]));
        }
    }
    return c;
}

}  // namespace

BijectivityResult enforce_bijectivity(const TriMesh& mesh, const PlanarEmbedding& domain,
                                      const PlanarEmbedding& map,
                                      const ConstraintSet& constraints, double bound,
                                      int max_rounds) {
    BijectivityResult result;
    result.map = map;

    MuCensus c = census(mesh, domain, result.map);
    while ((c.flips > 0 || c.max_abs > bound) && result.rounds < max_rounds) {
        const BeltramiField truncated = truncate_mu(c.mu, bound);
        result.map = solve_lbs(mesh, domain, truncated, constraints);
        ++result.rounds;
        c = census(mesh, domain, result.map);
    }
    result.remaining_flips = c.flips;
    result.success = (c.flips == 0 && c.max_abs <= bound + 1e-12);
    return result;
}

FeqcmResult feqcm(const TriMesh& mesh, const EllipsoidRadii& r, const PoleSpec& spec,
                  const LandmarkSet& landmarks, const FeqcmOptions& opts) {
    for (const auto& pair : landmarks.pairs)
        if (pair.vertex >= static_cast<int>(mesh.num_vertices()))
            throw std::invalid_argument("landmark vertex index out of range");

    ParamResult base = fecm(mesh, r, spec, opts.fecm);
    const PlanarEmbedding& domain = base.after_scale;

    std::vector<cplx> targets = lift_landmarks(landmarks, r);

    auto solve_with_targets = [&](const std::vector<cplx>& q) {
        ConstraintSet constraints;
        if (domain.infinity_vertex >= 0) {
            std::vector<char> in_ring(mesh.num_vertices(), 0);
            for (const auto& f : mesh.faces) {
                if (f[0] != domain.infinity_vertex && f[1] != domain.infinity_vertex &&
                    f[2] != domain.infinity_vertex)
                    continue;
                for (int v : f)
                    if (v != domain.infinity_vertex) in_ring[v] = 1;
            }
            for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
                if (in_ring[v]) constraints.pins.push_back({static_cast<int>(v), domain.pos[v]});
        }
        constraints.lambda = landmarks.lambda;
        for (std::size_t i = 0; i < landmarks.pairs.size(); ++i)
            constraints.landmarks.push_back({landmarks.pairs[i].vertex, q[i]});

        PlanarEmbedding phi = solve_landmark_harmonic(mesh, domain, constraints);
        return enforce_bijectivity(mesh, domain, phi, constraints, opts.bijectivity_bound,
                                   opts.max_rounds);
    };

    BijectivityResult bij = solve_with_targets(targets);

    QcComposition qc = qc_compose_to_ellipsoid(mesh, bij.map, r, opts.fecm.psi_fixed_point_refine);

    if (opts.recompute_targets_via_psi) {
        // Forward-evaluate the planar correction at the lifted targets: psi(q~)
        // is the PL interpolation of map positions located in the pre-image.
        std::vector<cplx> adjusted =
            pl_invert(mesh, bij.map, qc.psi_inverse, targets, nullptr);
        bij = solve_with_targets(adjusted);
        qc = qc_compose_to_ellipsoid(mesh, bij.map, r, opts.fecm.psi_fixed_point_refine);
    }

    FeqcmResult out;
    out.param.radii = r;
    out.param.after_mobius = base.after_mobius;
    out.param.after_scale = bij.map;
    out.param.after_psi_inverse = qc.psi_inverse;
    out.param.positions = std::move(qc.positions);
    out.param.report = make_report(mesh, out.param.positions, r);
    out.param.report.landmark_mean_error = landmark_error(out.param.positions, landmarks);
    out.param.report.timings = base.report.timings;
    out.enforcement_rounds = bij.rounds;
    out.bijective = bij.success;
    return out;
}

}  // namespace ellipara
