#include "vsflow/mfd.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace vsflow {

double LocalInnerProduct::consistency_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < nf; ++k) s += M[i * nf + k] * N[k * 2 + j];
            worst = std::max(worst, std::abs(s - R[i * 2 + j]));
        }
    return worst;
}

LocalInnerProduct build_local_inner_product(const Mesh& mesh, std::size_t cell,
                                            const VgmMaterial& mat, double stab_scale) {
    if (stab_scale <= 0.0)
        throw std::invalid_argument("build_local_inner_product: stab_scale must be positive");
    const Cell& c = mesh.cells[cell];
    const std::size_t nf = c.faces.size();

    Eigen::MatrixXd N(nf, 2), R(nf, 2);
    for (std::size_t k = 0; k < nf; ++k) {
        const Face& f = mesh.faces[c.faces[k]];
        const double s = c.sigma[k];
        N(k, 0) = s * mat.K[0] * f.normal[0];
        N(k, 1) = s * mat.K[2] * f.normal[2];
        R(k, 0) = f.area * (f.centroid.x - c.centroid.x);
        R(k, 1) = f.area * (f.centroid.z - c.centroid.z);
    }

    Eigen::Matrix2d Kinv = Eigen::Matrix2d::Zero();
    Kinv(0, 0) = 1.0 / mat.K[0];
    Kinv(1, 1) = 1.0 / mat.K[2];

    const Eigen::MatrixXd consistent = (R * Kinv * R.transpose()) / c.volume;

    Eigen::Matrix2d NtN = N.transpose() * N;
    const double det = NtN.determinant();
    if (!(std::abs(det) > 1e-14 * NtN.norm() * NtN.norm()))
        throw std::runtime_error("build_local_inner_product: degenerate cell " +
                                 std::to_string(cell) + " (singular N^T N)");
    const Eigen::MatrixXd P =
        Eigen::MatrixXd::Identity(nf, nf) - N * NtN.inverse() * N.transpose();

    const double gamma = stab_scale * consistent.trace() / static_cast<double>(nf);
    const Eigen::MatrixXd M = consistent + gamma * P;

    LocalInnerProduct out;
    out.nf = nf;
    out.gamma = gamma;
    out.M.resize(nf * nf);
    out.N.resize(nf * 2);
    out.R.resize(nf * 2);
    for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = 0; j < nf; ++j) out.M[i * nf + j] = M(i, j);
        out.N[i * 2 + 0] = N(i, 0);
        out.N[i * 2 + 1] = N(i, 1);
        out.R[i * 2 + 0] = R(i, 0);
        out.R[i * 2 + 1] = R(i, 1);
    }
    return out;
}

MfdSystem::MfdSystem(Mesh mesh, std::vector<VgmMaterial> materials,
                     std::vector<int> cell_materials, BoundarySpec bc, SourceField sources,
                     FaceApproximation approx, ContinuationKind kind, RelpermModel relperm,
                     double stab_scale)
    : mesh_(std::move(mesh)),
      mats_(std::move(materials)),
      cmat_(std::move(cell_materials)),
      bc_(std::move(bc)),
      src_(std::move(sources)),
      approx_(approx),
      kind_(kind),
      relperm_(relperm) {
    if (cmat_.size() != mesh_.cells.size())
        throw std::invalid_argument("MfdSystem: material map size mismatch");
    if (src_.size() != mesh_.cells.size())
        throw std::invalid_argument("MfdSystem: source field size mismatch");

    nf_ = mesh_.faces.size();
    nc_ = mesh_.cells.size();
    if (size() != nf_ + nc_) throw std::logic_error("MfdSystem: unknown layout broken");

    auto [fbc, mean] = resolve_face_bc(mesh_, bc_);
    fbc_ = std::move(fbc);
    start_head_ = mean;

    local_.reserve(nc_);
    for (std::size_t c = 0; c < nc_; ++c)
        local_.push_back(build_local_inner_product(mesh_, c, mats_[cmat_[c]], stab_scale));

    // Constant flux-block rows (everything except Neumann rows is linear
    // with q-independent coefficients).
    flux_constant_.assign(nf_, 0.0);
    for (std::size_t ci = 0; ci < nc_; ++ci) {
        const Cell& c = mesh_.cells[ci];
        const LocalInnerProduct& lip = local_[ci];
        for (std::size_t a = 0; a < c.faces.size(); ++a) {
            const Face& fa = mesh_.faces[c.faces[a]];
            if (fa.boundary() && fbc_[fa.id].kind == BcKind::Neumann) continue;
            const double sa = c.sigma[a];
            // sigma(c,f)*(M_c w_hat_c)_f with w_hat = sigma*w
            for (std::size_t b = 0; b < c.faces.size(); ++b) {
                const double sb = c.sigma[b];
                linear_.push_back({fa.id, mesh_.faces[c.faces[b]].id, sa * sb * lip.m(a, b)});
            }
            linear_.push_back({fa.id, nf_ + ci, -sa * fa.area});
            if (fa.boundary() && fbc_[fa.id].kind == BcKind::Dirichlet)
                flux_constant_[fa.id] = fa.area * fbc_[fa.id].value;
        }
    }
}

// Continuation-parametrized face relative permeability. p2 is used only for
// interior faces (the second adjacent cell's head). The face velocity w is
// oriented along the stored normal, out of cells[0], so positive w makes
// cells[0] (or the interior cell, on the boundary) the donor.
template <class T>
T MfdSystem::face_kappa(const Face& f, double q, T w, T p1, T p2) const {
    if (relperm_ == RelpermModel::Unit) return continuation_of_kr(T(1.0), q, kind_);
    const VgmMaterial& m1 = mats_[cmat_[f.cells[0]]];
    const double z1 = mesh_.cells[f.cells[0]].centroid.z;
    T kr;
    if (f.boundary()) {
        const FaceBc& b = fbc_[f.id];
        if (b.kind == BcKind::Neumann) {
            kr = kr_of_head(m1, p1, z1);
        } else {
            const T krc = kr_of_head(m1, p1, z1);
            const T krb = T(kr_of_head(m1, b.value, f.centroid.z));
            kr = donor_relperm(w, krc, krb, approx_);
        }
    } else {
        const VgmMaterial& m2 = mats_[cmat_[f.cells[1]]];
        const double z2 = mesh_.cells[f.cells[1]].centroid.z;
        const T kr1 = kr_of_head(m1, p1, z1);
        const T kr2 = kr_of_head(m2, p2, z2);
        kr = donor_relperm(w, kr1, kr2, approx_);
    }
    return continuation_of_kr(kr, q, kind_);
}

void MfdSystem::residual(std::span<const double> x, double q, std::span<double> out) const {
    if (x.size() != size() || out.size() != size())
        throw std::invalid_argument("MfdSystem::residual: size mismatch");
    std::fill(out.begin(), out.end(), 0.0);

    for (const Triplet& t : linear_) out[t.row] += t.val * x[t.col];
    for (std::size_t f = 0; f < nf_; ++f) out[f] += flux_constant_[f];

    for (const Face& f : mesh_.faces) {
        const double w = x[f.id];
        const double kap = f.boundary()
                               ? face_kappa(f, q, w, x[nf_ + f.cells[0]], 0.0)
                               : face_kappa(f, q, w, x[nf_ + f.cells[0]], x[nf_ + f.cells[1]]);
        if (f.boundary() && fbc_[f.id].kind == BcKind::Neumann) {
            // prescribed outward normal velocity is -inflow
            out[f.id] = kap * w + fbc_[f.id].value;
        }
        const double flow = kap * w * f.area;
        out[nf_ + f.cells[0]] += mesh_.sigma(f.cells[0], f.id) * flow;
        if (!f.boundary()) out[nf_ + f.cells[1]] += mesh_.sigma(f.cells[1], f.id) * flow;
    }
    for (std::size_t c = 0; c < nc_; ++c) out[nf_ + c] -= src_[c] * mesh_.cells[c].volume;
}

SparseMatrix MfdSystem::jacobian(std::span<const double> x, double q) const {
    if (x.size() != size()) throw std::invalid_argument("MfdSystem::jacobian: size mismatch");
    SparseBuilder b(size());
    for (std::size_t i = 0; i < size(); ++i) b.add(i, i, 0.0);
    for (const Triplet& t : linear_) b.add(t.row, t.col, t.val);

    for (const Face& f : mesh_.faces) {
        const std::size_t c1 = f.cells[0];
        const double w = x[f.id];
        if (f.boundary()) {
            const Dual k1 = face_kappa(f, q, Dual(w), Dual(x[nf_ + c1], 1.0), Dual(0.0));
            if (fbc_[f.id].kind == BcKind::Neumann) {
                b.add(f.id, f.id, k1.v);
                b.add(f.id, nf_ + c1, w * k1.d);
            }
            const int s1 = mesh_.sigma(c1, f.id);
            b.add(nf_ + c1, f.id, s1 * f.area * k1.v);
            b.add(nf_ + c1, nf_ + c1, s1 * f.area * w * k1.d);
        } else {
            const std::size_t c2 = f.cells[1];
            const Dual k1 = face_kappa(f, q, Dual(w), Dual(x[nf_ + c1], 1.0), Dual(x[nf_ + c2]));
            const Dual k2 = face_kappa(f, q, Dual(w), Dual(x[nf_ + c1]), Dual(x[nf_ + c2], 1.0));
            const int s1 = mesh_.sigma(c1, f.id);
            const int s2 = mesh_.sigma(c2, f.id);
            b.add(nf_ + c1, f.id, s1 * f.area * k1.v);
            b.add(nf_ + c1, nf_ + c1, s1 * f.area * w * k1.d);
            b.add(nf_ + c1, nf_ + c2, s1 * f.area * w * k2.d);
            b.add(nf_ + c2, f.id, s2 * f.area * k1.v);
            b.add(nf_ + c2, nf_ + c1, s2 * f.area * w * k1.d);
            b.add(nf_ + c2, nf_ + c2, s2 * f.area * w * k2.d);
        }
    }
    return b.compress();
}

std::vector<double> MfdSystem::initial_guess() const {
    std::vector<double> x(size(), 0.0);
    for (std::size_t c = 0; c < nc_; ++c) x[nf_ + c] = start_head_;
    return x;
}

std::vector<double> MfdSystem::cell_heads(std::span<const double> x) const {
    return std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(nf_), x.end());
}

std::vector<double> MfdSystem::face_discharge(std::span<const double> x, double q) const {
    std::vector<double> u(nf_, 0.0);
    for (const Face& f : mesh_.faces) {
        const double w = x[f.id];
        const double kap = f.boundary()
                               ? face_kappa(f, q, w, x[nf_ + f.cells[0]], 0.0)
                               : face_kappa(f, q, w, x[nf_ + f.cells[0]], x[nf_ + f.cells[1]]);
        u[f.id] = kap * w * f.area;
    }
    return u;
}

}  // namespace vsflow
