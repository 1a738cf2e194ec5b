#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vsflow/mesh.hpp"

namespace vsflow {

/// One scalar value per cell.
struct CellScalar {
    std::string name;
    std::vector<double> data;
};

/// Legacy ASCII VTK unstructured-grid dump of the mesh and cell fields.
/// The cross-section plane (x, z) is written to the first two point
/// coordinates so viewers show it head-on.
void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<CellScalar>& scalars,
               const std::vector<int>& material);

void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<CellScalar>& scalars, const std::vector<int>& material);

/// Per-face CSV: id, side, centroid, normal, area, normal velocity (m/day),
/// discharge (m^3/day).
void write_faces_csv(std::ostream& os, const Mesh& mesh, const std::vector<double>& discharge);

}  // namespace vsflow
