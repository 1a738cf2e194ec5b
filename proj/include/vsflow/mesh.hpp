#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace vsflow {

struct Point {
    double x = 0.0;
    double y = 0.0;  // always 0 for cross-section meshes
    double z = 0.0;  // vertical coordinate entering h = psi + z
};

/// Which part of the domain boundary a face belongs to.
enum class Side { Interior, Left, Right, Bottom, Top };

std::string side_name(Side s);

struct Face {
    std::size_t id = 0;
    double area = 0.0;          // edge length x unit thickness, m^2
    Point centroid;
    std::array<double, 3> normal{0.0, 0.0, 0.0};  // unit, fixed global orientation
    // Adjacent cells; interior faces have two, boundary faces one.
    // The stored normal points from cells[0] to cells[1] (interior) or out
    // of the domain (boundary), so sigma(cells[0]) = +1, sigma(cells[1]) = -1.
    std::vector<std::size_t> cells;
    Side side = Side::Interior;
    std::array<std::size_t, 2> nodes{0, 0};

    bool boundary() const { return cells.size() == 1; }
};

struct Cell {
    std::size_t id = 0;
    double volume = 0.0;  // polygon area x unit thickness, m^3
    Point centroid;
    std::vector<std::size_t> faces;
    std::vector<int> sigma;  // +1 when the stored face normal points out of this cell
    int material = 0;
};

/// 2D quadrilateral cell-face mesh with unit out-of-plane thickness.
/// Immutable after construction.
struct Mesh {
    std::vector<Point> points;
    std::vector<Face> faces;
    std::vector<Cell> cells;

    std::vector<std::size_t> boundary_faces(Side s) const;

    int sigma(std::size_t cell, std::size_t face) const;

    /// max over cells of |sum_f sigma*area*normal| / sum_f area
    double closedness_defect() const;
    /// max over cells of rel. deviation of sum_f sigma*area*(x_f-x_c)*n^T from vol*I
    double linear_exactness_defect() const;

    double total_volume() const;
};

/// Structured quadrilateral grid on [0,Lx] x [0,Lz]; node z-coordinates are
/// shifted by shear_slope*x so horizontal layers become inclined planes.
Mesh build_structured_grid(std::size_t nx, std::size_t nz, double Lx, double Lz,
                           double shear_slope = 0.0);

/// Structured grid with interior nodes displaced by uniform random amounts
/// of at most jitter*min(dx,dz) per coordinate. Deterministic for a fixed
/// seed. jitter in [0, 0.5).
Mesh build_perturbed_grid(std::size_t nx, std::size_t nz, double Lx, double Lz,
                          double jitter, unsigned rng_seed);

/// General builder: jitter applied on the unsheared lattice, then shear.
Mesh build_grid(std::size_t nx, std::size_t nz, double Lx, double Lz, double shear_slope,
                double jitter, unsigned rng_seed);

/// Region rule: predicate on the cell centroid, first match wins.
struct RegionRule {
    std::function<bool(const Point&)> contains;
    int material = 0;
};

/// Total map from cell id to material id; throws if any cell is uncovered,
/// naming its centroid.
std::vector<int> assign_materials(const Mesh& mesh, const std::vector<RegionRule>& rules);

}  // namespace vsflow
