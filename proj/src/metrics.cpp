#include "ellipara/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <stdexcept>

#include "ellipara/beltrami.hpp"
#include "ellipara/feqcm.hpp"

namespace ellipara {

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

}  // namespace

std::vector<double> area_distortion(const TriMesh& mesh, const std::vector<Vec3>& param) {
    const std::size_t nf = mesh.num_faces();
    std::vector<double> src(nf), img(nf);
    double total_src = 0.0, total_img = 0.0;
    for (std::size_t fi = 0; fi < nf; ++fi) {
        const auto& f = mesh.faces[fi];
        src[fi] = face_geometry(mesh, static_cast<int>(fi)).area;
        img[fi] = triangle_geometry(param[f[0]], param[f[1]], param[f[2]]).area;
        total_src += src[fi];
        total_img += img[fi];
    }
    if (total_src <= 0.0 || total_img <= 0.0)
        throw std::runtime_error("degenerate total area");

    std::vector<double> d(nf, 0.0);
    int skipped = 0;
    for (std::size_t fi = 0; fi < nf; ++fi) {
        if (src[fi] <= 0.0 || img[fi] <= 0.0) {
            ++skipped;
            continue;
        }
        d[fi] = std::log((img[fi] / total_img) / (src[fi] / total_src));
    }
    if (skipped > 0)
        std::fprintf(stderr, "warning: %d zero-area faces excluded from d_area\n", skipped);
    return d;
}

MuStats mu_stats(const TriMesh& mesh, const std::vector<Vec3>& param) {
    const BeltramiField field = mu_surface_map(mesh, mesh.vertices, param);
    MuStats stats;
    stats.abs_mu.resize(field.size(), 0.0);
    std::vector<double> admissible_abs;
    admissible_abs.reserve(field.size());
    for (std::size_t fi = 0; fi < field.size(); ++fi) {
        if (!field.admissible[fi]) {
            ++stats.inadmissible;
            stats.abs_mu[fi] = 1.0;  // capped for the histogram
            continue;
        }
        stats.abs_mu[fi] = std::abs(field.mu[fi]);
        admissible_abs.push_back(stats.abs_mu[fi]);
    }
    const auto ms = mean_sd(admissible_abs);
    stats.mean = ms.first;
    stats.sd = ms.second;
    return stats;
}

double landmark_error(const std::vector<Vec3>& param, const LandmarkSet& landmarks) {
    if (landmarks.pairs.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& pair : landmarks.pairs)
        sum += norm(param[pair.vertex] - pair.target);
    return sum / static_cast<double>(landmarks.pairs.size());
}

DistortionReport make_report(const TriMesh& mesh, const std::vector<Vec3>& param,
                             const EllipsoidRadii& r) {
    DistortionReport report;
    report.radii = r;

    const MuStats stats = mu_stats(mesh, param);
    report.abs_mu = stats.abs_mu;
    report.mean_abs_mu = stats.mean;
    report.sd_abs_mu = stats.sd;
    report.inadmissible_count = stats.inadmissible;

    report.d_area = area_distortion(mesh, param);
    std::vector<double> abs_d;
    abs_d.reserve(report.d_area.size());
    for (double d : report.d_area) abs_d.push_back(std::abs(d));
    const auto ms = mean_sd(abs_d);
    report.mean_abs_d_area = ms.first;
    report.sd_abs_d_area = ms.second;

    report.foldover_count = count_foldovers(mesh, param, r);

    report.mu_histogram.assign(50, 0);
    for (double m : report.abs_mu) {
        int bin = static_cast<int>(m / 0.02);
        bin = std::min(std::max(bin, 0), 49);
        ++report.mu_histogram[bin];
    }
    report.d_area_histogram.assign(160, 0);
    for (double d : report.d_area) {
        int bin = static_cast<int>((d + 8.0) / 0.1);
        bin = std::min(std::max(bin, 0), 159);
        ++report.d_area_histogram[bin];
    }
    return report;
}

std::string report_to_json(const DistortionReport& report) {
    nlohmann::ordered_json j;
    j["format"] = "ellipara-report/1";
    j["radii"] = {{"a", report.radii.a}, {"b", report.radii.b}, {"c", report.radii.c}};
    j["face_count"] = report.abs_mu.size();
    j["mu"] = {{"mean", report.mean_abs_mu},
               {"sd", report.sd_abs_mu},
               {"inadmissible", report.inadmissible_count},
               {"histogram_bin_width", 0.02},
               {"histogram", report.mu_histogram}};
    j["d_area"] = {{"mean_abs", report.mean_abs_d_area},
                   {"sd_abs", report.sd_abs_d_area},
                   {"histogram_min", -8.0},
                   {"histogram_bin_width", 0.1},
                   {"histogram", report.d_area_histogram}};
    j["foldovers"] = report.foldover_count;
    if (report.landmark_mean_error)
        j["landmark_mean_error"] = *report.landmark_mean_error;
    else
        j["landmark_mean_error"] = nullptr;
    nlohmann::ordered_json timings = nlohmann::ordered_json::array();
    for (const auto& t : report.timings)
        timings.push_back({{"stage", t.name}, {"seconds", t.seconds}});
    j["timings"] = timings;
    j["per_face"] = {{"abs_mu", report.abs_mu}, {"d_area", report.d_area}};
    return j.dump(2) + "\n";
}

void emit_report(const DistortionReport& report, const std::string& path, ReportFormat fmt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    if (fmt == ReportFormat::Json) {
        out << report_to_json(report);
    } else {
        char buf[128];
        out << "face,abs_mu,d_area\n";
        for (std::size_t fi = 0; fi < report.abs_mu.size(); ++fi) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", fi, report.abs_mu[fi],
                          report.d_area[fi]);
            out << buf;
        }
        out << "# summary\n";
        std::snprintf(buf, sizeof(buf), "# mean_abs_mu,%.17g\n", report.mean_abs_mu);
        out << buf;
        std::snprintf(buf, sizeof(buf), "# sd_abs_mu,%.17g\n", report.sd_abs_mu);
        out << buf;
        std::snprintf(buf, sizeof(buf), "# mean_abs_d_area,%.17g\n", report.mean_abs_d_area);
        out << buf;
        std::snprintf(buf, sizeof(buf), "# sd_abs_d_area,%.17g\n", report.sd_abs_d_area);
        out << buf;
        std::snprintf(buf, sizeof(buf), "# foldovers,%d\n", report.foldover_count);
        out << buf;
        std::snprintf(buf, sizeof(buf), "# radii,%.17g,%.17g,%.17g\n", report.radii.a,
                      report.radii.b, report.radii.c);
        out << buf;
        if (report.landmark_mean_error) {
            std::snprintf(buf, sizeof(buf), "# landmark_mean_error,%.17g\n",
                          *report.landmark_mean_error);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace ellipara
