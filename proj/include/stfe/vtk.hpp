#pragma once

#include <string>
#include <vector>

#include "stfe/mesh.hpp"

namespace stfe {

// Writes mesh and a vertex-indexed scalar field as a legacy ASCII VTK 3.0
// unstructured grid (POINT_DATA scalar named `field`).  Values beyond the
// vertex count (higher-order DOFs) are ignored; an empty vector writes the
// grid without point data.  Output is bit-stable for identical inputs.
// Throws std::runtime_error with the path on I/O failure.
void write_vtk(const SimplexMesh& mesh, const std::vector<double>& u,
               const std::string& path, const std::string& field = "u");

}  // namespace stfe
