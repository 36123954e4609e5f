#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ellipara/mesh.hpp"
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Distortion metrics and machine-readable reporting.
// ---------------------------------------------------------------------------

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct DistortionReport {
    std::vector<double> abs_mu;      // per face
    std::vector<double> d_area;      // per face, logged area ratio
    double mean_abs_mu = 0.0;
    double sd_abs_mu = 0.0;
    double mean_abs_d_area = 0.0;
    double sd_abs_d_area = 0.0;
    int foldover_count = 0;
    int inadmissible_count = 0;
    std::optional<double> landmark_mean_error;
    std::vector<StageTiming> timings;
    EllipsoidRadii radii;
    std::vector<long> mu_histogram;      // |mu| in [0,1], bin width 0.02
    std::vector<long> d_area_histogram;  // d_area in [-8,8], bin width 0.1
};

// Logged area ratio per face: log of the normalized image/source area ratio.
// Zero-area source faces get 0 with a warning flag via the degenerate list.
std::vector<double> area_distortion(const TriMesh& mesh, const std::vector<Vec3>& param);

struct MuStats {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> abs_mu;
    int inadmissible = 0;
};

MuStats mu_stats(const TriMesh& mesh, const std::vector<Vec3>& param);

struct LandmarkSet;  // defined in feqcm.hpp

double landmark_error(const std::vector<Vec3>& param, const LandmarkSet& landmarks);

DistortionReport make_report(const TriMesh& mesh, const std::vector<Vec3>& param,
                             const EllipsoidRadii& r);

enum class ReportFormat { Json, Csv };

void emit_report(const DistortionReport& report, const std::string& path, ReportFormat fmt);
std::string report_to_json(const DistortionReport& report);

}  // namespace ellipara
