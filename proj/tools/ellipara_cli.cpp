// ellipara: ellipsoidal conformal / quasi-conformal parameterization CLI.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellipara/fecm.hpp"
#include "ellipara/feqcm.hpp"
#include "ellipara/mesh_io.hpp"
#include "ellipara/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTopology = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
    std::string command;
    std::string input, output, report_path, landmarks_path, param_path;
    std::string radii_flag;
    bool optimize = false;
    std::string report_format = "json";
    int north = -1, south = -1, align = -1;
    double lambda = 1.0;
    double gamma0 = 0.1;
    int max_iters = 50;
    double tol = 1e-4;
};

ellipara::EllipsoidRadii parse_radii(const std::string& flag) {
    double a, b, c;
    char c1, c2;
    std::istringstream ss(flag);
    if (!(ss >> a >> c1 >> b >> c2 >> c) || c1 != ',' || c2 != ',' || !(ss >> std::ws).eof())
        throw CLI::ValidationError("--radii", "expected `a,b,c` with positive decimals");
    try {
        return ellipara::EllipsoidRadii(a, b, c);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--radii", e.what());
    }
}

void write_report(const ellipara::DistortionReport& report, const RunConfig& cfg,
                  const ellipara::RadiiTrace* trace) {
    if (cfg.report_path.empty()) return;
    const auto fmt = cfg.report_format == "csv" ? ellipara::ReportFormat::Csv
                                                : ellipara::ReportFormat::Json;
    if (fmt == ellipara::ReportFormat::Json) {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(ellipara::report_to_json(report));
        if (trace) {
            nlohmann::ordered_json steps = nlohmann::ordered_json::array();
            for (const auto& s : trace->steps)
                steps.push_back({{"a", s.radii.a},
                                 {"b", s.radii.b},
                                 {"c", s.radii.c},
                                 {"energy", s.energy}});
            j["radii_trace"] = {{"converged", trace->converged},
                                {"step_size", trace->step_size},
                                {"steps", steps}};
        }
        std::ofstream out(cfg.report_path, std::ios::binary);
        if (!out) throw std::runtime_error(cfg.report_path + ": cannot open for writing");
        out << j.dump(2) << "\n";
        if (!out) throw std::runtime_error(cfg.report_path + ": write failed");
    } else {
        ellipara::emit_report(report, cfg.report_path, fmt);
        if (trace) {
            std::ofstream out(cfg.report_path, std::ios::binary | std::ios::app);
            char buf[160];
            out << "# radii_trace\n";
            for (const auto& s : trace->steps) {
                std::snprintf(buf, sizeof(buf), "# step,%.17g,%.17g,%.17g,%.17g\n", s.radii.a,
                              s.radii.b, s.radii.c, s.energy);
                out << buf;
            }
        }
    }
}

ellipara::TriMesh as_param_positions(const ellipara::TriMesh& mesh,
                                     const std::vector<ellipara::Vec3>& positions) {
    ellipara::TriMesh out;
    out.vertices = positions;
    out.faces = mesh.faces;
    return out;
}

int run(const RunConfig& cfg) {
    std::string stage = "load";
    try {
        const ellipara::TriMesh mesh = ellipara::load_mesh(cfg.input);

        ellipara::PoleSpec poles;
        poles.north_vertex = cfg.north;
        poles.south_vertex = cfg.south;
        poles.align_vertex = cfg.align;

        if (cfg.command == "metrics") {
            stage = "metrics";
            const ellipara::TriMesh param = ellipara::load_mesh(cfg.param_path);
            if (param.vertices.size() != mesh.vertices.size() || param.faces != mesh.faces)
                throw std::runtime_error("--param mesh does not match --in connectivity");
            const auto radii = parse_radii(cfg.radii_flag);
            const auto report = ellipara::make_report(mesh, param.vertices, radii);
            stage = "report";
            write_report(report, cfg, nullptr);
            return kExitOk;
        }

        stage = "parameterization";
        ellipara::ParamResult result;
        std::optional<ellipara::RadiiTrace> trace;

        if (cfg.command == "sphere") {
            result = ellipara::fecm(mesh, ellipara::EllipsoidRadii(1, 1, 1), poles);
        } else if (cfg.command == "ellipsoid") {
            if (cfg.optimize) {
                auto [res, tr] = ellipara::optimize_radii(
                    mesh, poles, {cfg.gamma0, cfg.max_iters, cfg.tol});
                result = std::move(res);
                trace = std::move(tr);
            } else {
                result = ellipara::fecm(mesh, parse_radii(cfg.radii_flag), poles);
            }
        } else {  // landmark
            const auto radii = parse_radii(cfg.radii_flag);
            const auto landmarks =
                ellipara::load_landmarks(cfg.landmarks_path, cfg.lambda, &radii);
            auto res = ellipara::feqcm(mesh, radii, poles, landmarks);
            if (!res.bijective)
                std::cerr << "warning: bijectivity enforcement left " << res.param.report.foldover_count
                          << " fold-overs after " << res.enforcement_rounds << " rounds\n";
            result = std::move(res.param);
        }

        stage = "output";
        if (!cfg.output.empty())
            ellipara::write_mesh(as_param_positions(mesh, result.positions), cfg.output);
        stage = "report";
        write_report(result.report, cfg, trace ? &*trace : nullptr);
        return kExitOk;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        std::cerr << "error (" << stage << "): " << what << "\n";
        if (what.find("genus") != std::string::npos ||
            what.find("not a closed") != std::string::npos ||
            what.find("orientation is inconsistent") != std::string::npos)
            return kExitTopology;
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("ELLIPARA_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"ellipsoidal conformal parameterization of genus-0 meshes"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--in", cfg.input, "input mesh (obj/off/ply)")->required();
        auto* out = sub->add_option("--out", cfg.output, "output parameterized mesh");
        if (needs_out) out->required();
        sub->add_option("--report", cfg.report_path, "distortion report path");
        sub->add_option("--report-format", cfg.report_format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--north", cfg.north, "north pole vertex index (default: auto)");
        sub->add_option("--south", cfg.south, "south pole vertex index (default: auto)");
        sub->add_option("--align", cfg.align, "alignment vertex index (default: auto)");
    };

    auto* sphere = app.add_subcommand("sphere", "conformal map to the unit sphere");
    add_common(sphere, false);

    auto* ellipsoid = app.add_subcommand("ellipsoid", "conformal map to an ellipsoid");
    add_common(ellipsoid, false);
    auto* radii_opt = ellipsoid->add_option("--radii", cfg.radii_flag, "ellipsoid radii a,b,c");
    auto* optimize_opt =
        ellipsoid->add_flag("--optimize-radii", cfg.optimize, "optimize the radii");
    radii_opt->excludes(optimize_opt);
    ellipsoid->add_option("--gamma0", cfg.gamma0, "optimizer initial step");
    ellipsoid->add_option("--max-iters", cfg.max_iters, "optimizer iteration cap");
    ellipsoid->add_option("--tol", cfg.tol, "optimizer relative energy tolerance");

    auto* landmark = app.add_subcommand("landmark", "landmark-constrained quasi-conformal map");
    add_common(landmark, false);
    landmark->add_option("--radii", cfg.radii_flag, "ellipsoid radii a,b,c")->required();
    landmark->add_option("--landmarks", cfg.landmarks_path, "CSV `vertex,qx,qy,qz`")->required();
    landmark->add_option("--lambda", cfg.lambda, "landmark penalty weight");

    auto* metrics = app.add_subcommand("metrics", "report for an existing parameterization");
    metrics->add_option("--in", cfg.input, "source mesh")->required();
    metrics->add_option("--param", cfg.param_path, "parameterized mesh")->required();
    metrics->add_option("--radii", cfg.radii_flag, "ellipsoid radii a,b,c")->required();
    metrics->add_option("--report", cfg.report_path, "report path")->required();
    metrics->add_option("--report-format", cfg.report_format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "ellipsoid" && cfg.radii_flag.empty() && !cfg.optimize) {
        std::cerr << "error: ellipsoid requires exactly one of --radii or --optimize-radii\n";
        return kExitUsage;
    }
    if (!cfg.radii_flag.empty()) {
        try {
            parse_radii(cfg.radii_flag);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    return run(cfg);
}
