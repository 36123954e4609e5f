#include "ellipara/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ellipara {

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");
    TriMesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) fail(path, "malformed vertex at line " + std::to_string(lineno));
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // accept v, v/t, v/t/n, v//n
                int v = 0;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (res.ec != std::errc{}) fail(path, "malformed face at line " + std::to_string(lineno));
                if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;  // relative indexing
                idx.push_back(v - 1);  // OBJ is 1-based
            }
            if (idx.size() != 3) fail(path, "non-triangular face at line " + std::to_string(lineno));
            mesh.faces.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return mesh;
}

TriMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");
    std::string header;
    in >> header;
    if (header != "OFF") fail(path, "missing OFF header");
    std::size_t nv = 0, nf = 0, ne = 0;
    if (!(in >> nv >> nf >> ne)) fail(path, "malformed OFF counts");
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices)
        if (!(in >> v.x >> v.y >> v.z)) fail(path, "malformed OFF vertex");
    mesh.faces.reserve(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        int n = 0;
        if (!(in >> n)) fail(path, "malformed OFF face");
        if (n != 3) fail(path, "non-triangular face");
        std::array<int, 3> idx{};
        if (!(in >> idx[0] >> idx[1] >> idx[2])) fail(path, "malformed OFF face");
        mesh.faces.push_back(idx);
    }
    return mesh;
}

TriMesh load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");
    std::string line;
    std::getline(in, line);
    if (line.rfind("ply", 0) != 0) fail(path, "missing ply header");
    std::size_t nv = 0, nf = 0;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tag == "element") {
            std::string what;
            std::size_t n;
            ls >> what >> n;
            if (what == "vertex") nv = n;
            if (what == "face") nf = n;
        } else if (tag == "end_header") {
            break;
        }
    }
    if (!ascii) fail(path, "only ascii PLY supported");
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        std::getline(in, line);
        std::istringstream ls(line);
        if (!(ls >> v.x >> v.y >> v.z)) fail(path, "malformed PLY vertex");
    }
    mesh.faces.reserve(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        std::getline(in, line);
        std::istringstream ls(line);
        int n = 0;
        if (!(ls >> n)) fail(path, "malformed PLY face");
        if (n != 3) fail(path, "non-triangular face");
        std::array<int, 3> idx{};
        if (!(ls >> idx[0] >> idx[1] >> idx[2])) fail(path, "malformed PLY face");
        mesh.faces.push_back(idx);
    }
    return mesh;
}

void write_coords(std::ostream& out, const Vec3& v) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", v.x, v.y, v.z);
    out << buf;
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "obj") return MeshFormat::Obj;
    if (ext == "off") return MeshFormat::Off;
    if (ext == "ply") return MeshFormat::Ply;
    throw std::runtime_error(path + ": unsupported mesh format '" + ext + "'");
}

TriMesh load_mesh(const std::string& path, MeshFormat format) {
    if (format == MeshFormat::Auto) format = format_from_path(path);
    TriMesh mesh;
    switch (format) {
        case MeshFormat::Obj: mesh = load_obj(path); break;
        case MeshFormat::Off: mesh = load_off(path); break;
        case MeshFormat::Ply: mesh = load_ply(path); break;
        default: fail(path, "unsupported format");
    }
    for (const auto& f : mesh.faces)
        for (int v : f)
            if (v < 0 || v >= static_cast<int>(mesh.num_vertices()))
                fail(path, "face index out of range");
    return mesh;
}

void write_mesh(const TriMesh& mesh, const std::string& path, MeshFormat format) {
    if (format == MeshFormat::Auto) format = format_from_path(path);
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    switch (format) {
        case MeshFormat::Obj:
            for (const auto& v : mesh.vertices) {
                out << "v ";
                write_coords(out, v);
                out << '\n';
            }
            for (const auto& f : mesh.faces)
                out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
            break;
        case MeshFormat::Off:
            out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
            for (const auto& v : mesh.vertices) {
                write_coords(out, v);
                out << '\n';
            }
            for (const auto& f : mesh.faces)
                out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
            break;
        case MeshFormat::Ply:
            out << "ply\nformat ascii 1.0\n"
                << "element vertex " << mesh.num_vertices() << '\n'
                << "property double x\nproperty double y\nproperty double z\n"
                << "element face " << mesh.num_faces() << '\n'
                << "property list uchar int vertex_indices\nend_header\n";
            for (const auto& v : mesh.vertices) {
                write_coords(out, v);
                out << '\n';
            }
            for (const auto& f : mesh.faces)
                out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
            break;
        default:
            throw std::runtime_error(path + ": unsupported format");
    }
    if (!out) throw std::runtime_error(path + ": write failure");
}

}  // namespace ellipara
