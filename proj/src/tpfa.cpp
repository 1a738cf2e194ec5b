#include "vsflow/tpfa.hpp"

#include <cmath>
#include <stdexcept>

namespace vsflow {

double half_transmissibility(const Mesh& mesh, std::size_t cell, std::size_t face,
                             const VgmMaterial& mat) {
    const Face& f = mesh.faces[face];
    const Cell& c = mesh.cells[cell];
    const double nx = f.normal[0], ny = f.normal[1], nz = f.normal[2];
    const double nkn = nx * nx * mat.K[0] + ny * ny * mat.K[1] + nz * nz * mat.K[2];
    const double dist = std::abs((f.centroid.x - c.centroid.x) * nx +
                                 (f.centroid.y - c.centroid.y) * ny +
                                 (f.centroid.z - c.centroid.z) * nz);
    if (dist <= 1e-14)
        throw std::runtime_error("half_transmissibility: degenerate cell-face distance");
    return f.area * nkn / dist;
}

double face_transmissibility(double t1, double t2) { return t1 * t2 / (t1 + t2); }

TpfaSystem::TpfaSystem(Mesh mesh, std::vector<VgmMaterial> materials,
                       std::vector<int> cell_materials, BoundarySpec bc, SourceField sources,
                       FaceApproximation approx, ContinuationKind kind, RelpermModel relperm)
    : mesh_(std::move(mesh)),
      mats_(std::move(materials)),
      cmat_(std::move(cell_materials)),
      bc_(std::move(bc)),
      src_(std::move(sources)),
      approx_(approx),
      kind_(kind),
      relperm_(relperm) {
    if (cmat_.size() != mesh_.cells.size())
        throw std::invalid_argument("TpfaSystem: material map size mismatch");
    if (src_.size() != mesh_.cells.size())
        throw std::invalid_argument("TpfaSystem: source field size mismatch");

    auto [fbc, mean] = resolve_face_bc(mesh_, bc_);
    fbc_ = std::move(fbc);
    start_head_ = mean;

    trans_.assign(mesh_.faces.size(), 0.0);
    for (const Face& f : mesh_.faces) {
        if (f.boundary()) {
            if (fbc_[f.id].kind == BcKind::Dirichlet)
                trans_[f.id] = half_transmissibility(mesh_, f.cells[0], f.id, mats_[cmat_[f.cells[0]]]);
        } else {
            const double t1 = half_transmissibility(mesh_, f.cells[0], f.id, mats_[cmat_[f.cells[0]]]);
            const double t2 = half_transmissibility(mesh_, f.cells[1], f.id, mats_[cmat_[f.cells[1]]]);
            trans_[f.id] = face_transmissibility(t1, t2);
        }
    }
}

// Discharge through face f along its stored normal, as a function of the
// adjacent heads. h2 is ignored for boundary faces (the Dirichlet head is
// read from the resolved conditions; Neumann faces have prescribed flux).
template <class T>
T TpfaSystem::flux(const Face& f, double q, T h1, T h2) const {
    const bool unit = relperm_ == RelpermModel::Unit;
    if (f.boundary()) {
        const FaceBc& b = fbc_[f.id];
        if (b.kind == BcKind::Neumann) return T(-b.value * f.area);
        const VgmMaterial& mat = mats_[cmat_[f.cells[0]]];
        const double zc = mesh_.cells[f.cells[0]].centroid.z;
        const T hd(b.value);
        const T kr_c = unit ? T(1.0) : kr_of_head(mat, h1, zc);
        const T kr_b = unit ? T(1.0) : T(kr_of_head(mat, b.value, f.centroid.z));
        const T krf = face_relperm(h1, hd, kr_c, kr_b, approx_);
        return continuation_of_kr(krf, q, kind_) * T(trans_[f.id]) * (h1 - hd);
    }
    const VgmMaterial& m1 = mats_[cmat_[f.cells[0]]];
    const VgmMaterial& m2 = mats_[cmat_[f.cells[1]]];
    const T kr1 = unit ? T(1.0) : kr_of_head(m1, h1, mesh_.cells[f.cells[0]].centroid.z);
    const T kr2 = unit ? T(1.0) : kr_of_head(m2, h2, mesh_.cells[f.cells[1]].centroid.z);
    const T krf = face_relperm(h1, h2, kr1, kr2, approx_);
    return continuation_of_kr(krf, q, kind_) * T(trans_[f.id]) * (h1 - h2);
}

void TpfaSystem::residual(std::span<const double> x, double q, std::span<double> out) const {
    if (x.size() != size() || out.size() != size())
        throw std::invalid_argument("TpfaSystem::residual: size mismatch");
    for (std::size_t c = 0; c < size(); ++c) out[c] = -src_[c] * mesh_.cells[c].volume;
    for (const Face& f : mesh_.faces) {
        if (f.boundary()) {
            out[f.cells[0]] += flux(f, q, x[f.cells[0]], 0.0);
        } else {
            const double u = flux(f, q, x[f.cells[0]], x[f.cells[1]]);
            out[f.cells[0]] += u;
            out[f.cells[1]] -= u;
        }
    }
}

SparseMatrix TpfaSystem::jacobian(std::span<const double> x, double q) const {
    if (x.size() != size()) throw std::invalid_argument("TpfaSystem::jacobian: size mismatch");
    SparseBuilder b(size());
    for (std::size_t c = 0; c < size(); ++c) b.add(c, c, 0.0);  // keep diagonal structural
    for (const Face& f : mesh_.faces) {
        const std::size_t c1 = f.cells[0];
        if (f.boundary()) {
            if (fbc_[f.id].kind == BcKind::Neumann) continue;
            const Dual du = flux(f, q, Dual(x[c1], 1.0), Dual(0.0));
            b.add(c1, c1, du.d);
        } else {
            const std::size_t c2 = f.cells[1];
            const Dual d1 = flux(f, q, Dual(x[c1], 1.0), Dual(x[c2]));
            const Dual d2 = flux(f, q, Dual(x[c1]), Dual(x[c2], 1.0));
            b.add(c1, c1, d1.d);
            b.add(c1, c2, d2.d);
            b.add(c2, c1, -d1.d);
            b.add(c2, c2, -d2.d);
        }
    }
    return b.compress();
}

std::vector<double> TpfaSystem::initial_guess() const {
    return std::vector<double>(size(), start_head_);
}

std::vector<double> TpfaSystem::cell_heads(std::span<const double> x) const {
    return std::vector<double>(x.begin(), x.end());
}

std::vector<double> TpfaSystem::face_discharge(std::span<const double> x, double q) const {
    std::vector<double> u(mesh_.faces.size(), 0.0);
    for (const Face& f : mesh_.faces)
        u[f.id] = f.boundary() ? flux(f, q, x[f.cells[0]], 0.0)
                               : flux(f, q, x[f.cells[0]], x[f.cells[1]]);
    return u;
}

}  // namespace vsflow
