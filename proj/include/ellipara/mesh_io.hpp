#pragma once
#include <string>

#include "ellipara/mesh.hpp"

namespace ellipara {

enum class MeshFormat { Obj, Off, Ply, Auto };

// Throws std::runtime_error on parse failure or non-triangular faces.
TriMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);

// Writer emits >= 15 significant digits so load(write(m)) round-trips.
void write_mesh(const TriMesh& mesh, const std::string& path,
                MeshFormat format = MeshFormat::Auto);

MeshFormat format_from_path(const std::string& path);

}  // namespace ellipara
