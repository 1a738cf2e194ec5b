#include "vsflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vsflow {

std::string side_name(Side s) {
    switch (s) {
        case Side::Interior: return "interior";
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Bottom: return "bottom";
        case Side::Top: return "top";
    }
    return "?";
}

std::vector<std::size_t> Mesh::boundary_faces(Side s) const {
    std::vector<std::size_t> out;
    for (const Face& f : faces)
        if (f.side == s) out.push_back(f.id);
    return out;
}

int Mesh::sigma(std::size_t cell, std::size_t face) const {
    const Cell& c = cells[cell];
    for (std::size_t k = 0; k < c.faces.size(); ++k)
        if (c.faces[k] == face) return c.sigma[k];
    throw std::logic_error("sigma: face not adjacent to cell");
}

double Mesh::closedness_defect() const {
    double worst = 0.0;
    for (const Cell& c : cells) {
        double sx = 0.0, sz = 0.0, atot = 0.0;
        for (std::size_t k = 0; k < c.faces.size(); ++k) {
            const Face& f = faces[c.faces[k]];
            sx += c.sigma[k] * f.area * f.normal[0];
            sz += c.sigma[k] * f.area * f.normal[2];
            atot += f.area;
        }
        worst = std::max(worst, std::hypot(sx, sz) / atot);
    }
    return worst;
}

double Mesh::linear_exactness_defect() const {
    double worst = 0.0;
    for (const Cell& c : cells) {
        // in-plane (x,z) 2x2 matrix sum_f sigma*area*(x_f - x_c)*n^T
        double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (std::size_t k = 0; k < c.faces.size(); ++k) {
            const Face& f = faces[c.faces[k]];
            const double w = c.sigma[k] * f.area;
            const double dx = f.centroid.x - c.centroid.x;
            const double dz = f.centroid.z - c.centroid.z;
            m[0][0] += w * dx * f.normal[0];
            m[0][1] += w * dx * f.normal[2];
            m[1][0] += w * dz * f.normal[0];
            m[1][1] += w * dz * f.normal[2];
        }
        double dev = 0.0;
        dev = std::max(dev, std::abs(m[0][0] - c.volume));
        dev = std::max(dev, std::abs(m[1][1] - c.volume));
        dev = std::max(dev, std::abs(m[0][1]));
        dev = std::max(dev, std::abs(m[1][0]));
        worst = std::max(worst, dev / c.volume);
    }
    return worst;
}

double Mesh::total_volume() const {
    double v = 0.0;
    for (const Cell& c : cells) v += c.volume;
    return v;
}

namespace {

struct Poly4 {
    // counterclockwise corners in the (x,z) plane
    std::array<Point, 4> p;

    double area() const {
        double a = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Point& u = p[i];
            const Point& v = p[(i + 1) % 4];
            a += u.x * v.z - v.x * u.z;
        }
        return 0.5 * a;
    }

    Point centroid() const {
        double a = 0.0, cx = 0.0, cz = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Point& u = p[i];
            const Point& v = p[(i + 1) % 4];
            const double cross = u.x * v.z - v.x * u.z;
            a += cross;
            cx += (u.x + v.x) * cross;
            cz += (u.z + v.z) * cross;
        }
        a *= 0.5;
        return {cx / (6.0 * a), 0.0, cz / (6.0 * a)};
    }
};

}  // namespace

Mesh build_grid(std::size_t nx, std::size_t nz, double Lx, double Lz, double shear_slope,
                double jitter, unsigned rng_seed) {
    if (nx < 1 || nz < 1) throw std::invalid_argument("mesh: nx, nz must be >= 1");
    if (Lx <= 0.0 || Lz <= 0.0) throw std::invalid_argument("mesh: Lx, Lz must be positive");
    if (std::abs(shear_slope) >= 1.0) throw std::invalid_argument("mesh: |shear_slope| must be < 1");
    if (jitter < 0.0 || jitter >= 0.5) throw std::invalid_argument("mesh: jitter must be in [0, 0.5)");

    const double dx = Lx / static_cast<double>(nx);
    const double dz = Lz / static_cast<double>(nz);
    const double amp = jitter * std::min(dx, dz);

    Mesh mesh;
    auto nid = [&](std::size_t i, std::size_t k) { return k * (nx + 1) + i; };

    mesh.points.resize((nx + 1) * (nz + 1));
    for (std::size_t k = 0; k <= nz; ++k)
        for (std::size_t i = 0; i <= nx; ++i)
            mesh.points[nid(i, k)] = {static_cast<double>(i) * dx, 0.0,
                                      static_cast<double>(k) * dz};

    if (jitter > 0.0) {
        std::mt19937 rng(rng_seed);
        std::uniform_real_distribution<double> u(-amp, amp);
        for (std::size_t k = 1; k < nz; ++k)
            for (std::size_t i = 1; i < nx; ++i) {
                Point& p = mesh.points[nid(i, k)];
                p.x += u(rng);
                p.z += u(rng);
            }
    }

    if (shear_slope != 0.0)
        for (Point& p : mesh.points) p.z += shear_slope * p.x;

    auto cid = [&](std::size_t i, std::size_t k) { return k * nx + i; };

    mesh.cells.resize(nx * nz);
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t i = 0; i < nx; ++i) {
            Cell& c = mesh.cells[cid(i, k)];
            c.id = cid(i, k);
            Poly4 poly{{mesh.points[nid(i, k)], mesh.points[nid(i + 1, k)],
                        mesh.points[nid(i + 1, k + 1)], mesh.points[nid(i, k + 1)]}};
            c.volume = poly.area();
            if (c.volume <= 0.0) throw std::runtime_error("mesh: degenerate cell");
            c.centroid = poly.centroid();
        }

    // A face is the edge between two nodes; normal = edge direction rotated
    // -90 deg in (x,z), then flipped if needed so it points from cells[0] to
    // cells[1] (interior) or out of the domain (boundary).
    auto add_face = [&](std::size_t n0, std::size_t n1, std::size_t front, std::size_t back,
                        bool has_front, bool has_back, Side side) {
        Face f;
        f.id = mesh.faces.size();
        f.nodes = {n0, n1};
        const Point& a = mesh.points[n0];
        const Point& b = mesh.points[n1];
        const double ex = b.x - a.x;
        const double ez = b.z - a.z;
        const double len = std::hypot(ex, ez);
        if (len <= 0.0) throw std::runtime_error("mesh: zero-length face");
        f.area = len;  // unit thickness
        f.centroid = {0.5 * (a.x + b.x), 0.0, 0.5 * (a.z + b.z)};
        f.normal = {ez / len, 0.0, -ex / len};
        f.side = side;

        // cells[0] is the cell the normal leaves (sigma = +1): `front` for
        // interior faces, the single adjacent cell for boundary faces.
        const std::size_t owner = has_front && has_back ? front : (has_front ? front : back);
        const Cell& oc = mesh.cells[owner];
        const double toward = (f.centroid.x - oc.centroid.x) * f.normal[0] +
                              (f.centroid.z - oc.centroid.z) * f.normal[2];
        if (toward < 0.0) f.normal = {-f.normal[0], 0.0, -f.normal[2]};
        if (has_front && has_back)
            f.cells = {front, back};
        else
            f.cells = {owner};
        mesh.faces.push_back(f);

        Cell& c0 = mesh.cells[f.cells[0]];
        c0.faces.push_back(f.id);
        c0.sigma.push_back(+1);
        if (f.cells.size() == 2) {
            Cell& c1 = mesh.cells[f.cells[1]];
            c1.faces.push_back(f.id);
            c1.sigma.push_back(-1);
        }
    };

    // vertical-ish faces (between horizontal neighbors); normal leaves the
    // left cell for interior faces
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t i = 0; i <= nx; ++i) {
            const bool has_left = i > 0;
            const bool has_right = i < nx;
            const Side side = has_left && has_right ? Side::Interior
                              : has_left            ? Side::Right
                                                    : Side::Left;
            if (has_left && has_right)
                add_face(nid(i, k), nid(i, k + 1), cid(i - 1, k), cid(i, k), true, true, side);
            else if (has_right)
                add_face(nid(i, k), nid(i, k + 1), cid(i, k), 0, true, false, side);
            else
                add_face(nid(i, k), nid(i, k + 1), cid(i - 1, k), 0, true, false, side);
        }

    // horizontal-ish faces (between vertical neighbors); normal leaves the
    // lower cell
    for (std::size_t k = 0; k <= nz; ++k)
        for (std::size_t i = 0; i < nx; ++i) {
            const bool has_below = k > 0;
            const bool has_above = k < nz;
            const Side side = has_below && has_above ? Side::Interior
                              : has_below             ? Side::Top
                                                      : Side::Bottom;
            if (has_below && has_above)
                add_face(nid(i, k), nid(i + 1, k), cid(i, k - 1), cid(i, k), true, true, side);
            else if (has_above)
                add_face(nid(i, k), nid(i + 1, k), cid(i, k), 0, true, false, side);
            else
                add_face(nid(i, k), nid(i + 1, k), cid(i, k - 1), 0, true, false, side);
        }

    return mesh;
}

Mesh build_structured_grid(std::size_t nx, std::size_t nz, double Lx, double Lz,
                           double shear_slope) {
    return build_grid(nx, nz, Lx, Lz, shear_slope, 0.0, 0);
}

Mesh build_perturbed_grid(std::size_t nx, std::size_t nz, double Lx, double Lz, double jitter,
                          unsigned rng_seed) {
    return build_grid(nx, nz, Lx, Lz, 0.0, jitter, rng_seed);
}

std::vector<int> assign_materials(const Mesh& mesh, const std::vector<RegionRule>& rules) {
    std::vector<int> map(mesh.cells.size(), -1);
    for (const Cell& c : mesh.cells) {
        bool hit = false;
        for (const RegionRule& r : rules)
            if (r.contains(c.centroid)) {
                map[c.id] = r.material;
                hit = true;
                break;
            }
        if (!hit) {
            std::ostringstream os;
            os << "assign_materials: cell " << c.id << " at (" << c.centroid.x << ", "
               << c.centroid.z << ") matched no region rule";
            throw std::runtime_error(os.str());
        }
    }
    return map;
}

}  // namespace vsflow
