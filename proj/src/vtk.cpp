#include "vsflow/vtk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace vsflow {

void write_vtk(std::ostream& os, const Mesh& mesh, const std::vector<CellScalar>& scalars,
               const std::vector<int>& material) {
    for (const CellScalar& s : scalars)
        if (s.data.size() != mesh.cells.size())
            throw std::invalid_argument("write_vtk: field '" + s.name + "' size mismatch");
    if (material.size() != mesh.cells.size())
        throw std::invalid_argument("write_vtk: material map size mismatch");

    os << "# vtk DataFile Version 3.0\n";
    os << "variably saturated flow fields (cross-section x,z in the view plane)\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << std::setprecision(17);

    os << "POINTS " << mesh.points.size() << " double\n";
    for (const Point& p : mesh.points) os << p.x << ' ' << p.z << ' ' << 0.0 << '\n';

    os << "CELLS " << mesh.cells.size() << ' ' << 5 * mesh.cells.size() << '\n';
    for (const Cell& c : mesh.cells) {
        // corner nodes, counterclockwise; recovered from the cell's faces
        // (each quad was built from 4 nodes; collect them via its faces)
        std::vector<std::size_t> corners;
        for (std::size_t k = 0; k < c.faces.size(); ++k) {
            const Face& f = mesh.faces[c.faces[k]];
            for (std::size_t n : {f.nodes[0], f.nodes[1]}) {
                bool seen = false;
                for (std::size_t m : corners) seen |= (m == n);
                if (!seen) corners.push_back(n);
            }
        }
        if (corners.size() != 4) throw std::logic_error("write_vtk: non-quad cell");
        // order counterclockwise around the centroid
        std::sort(corners.begin(), corners.end(), [&](std::size_t a, std::size_t b) {
            const Point& pa = mesh.points[a];
            const Point& pb = mesh.points[b];
            return std::atan2(pa.z - c.centroid.z, pa.x - c.centroid.x) <
                   std::atan2(pb.z - c.centroid.z, pb.x - c.centroid.x);
        });
        os << 4;
        for (std::size_t n : corners) os << ' ' << n;
        os << '\n';
    }

    os << "CELL_TYPES " << mesh.cells.size() << '\n';
    for (std::size_t i = 0; i < mesh.cells.size(); ++i) os << 9 << '\n';  // VTK_QUAD

    os << "CELL_DATA " << mesh.cells.size() << '\n';
    for (const CellScalar& s : scalars) {
        os << "SCALARS " << s.name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (double v : s.data) os << v << '\n';
    }
    os << "SCALARS material int 1\n";
    os << "LOOKUP_TABLE default\n";
    for (int m : material) os << m << '\n';
}

void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::vector<CellScalar>& scalars, const std::vector<int>& material) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write VTK file '" + path + "'");
    write_vtk(out, mesh, scalars, material);
}

void write_faces_csv(std::ostream& os, const Mesh& mesh, const std::vector<double>& discharge) {
    if (discharge.size() != mesh.faces.size())
        throw std::invalid_argument("write_faces_csv: discharge size mismatch");
    os << std::setprecision(17);
    os << "face,side,cx,cz,nx,nz,area,velocity,discharge\n";
    for (const Face& f : mesh.faces)
        os << f.id << ',' << side_name(f.side) << ',' << f.centroid.x << ',' << f.centroid.z
           << ',' << f.normal[0] << ',' << f.normal[2] << ',' << f.area << ','
           << discharge[f.id] / f.area << ',' << discharge[f.id] << '\n';
}

}  // namespace vsflow
