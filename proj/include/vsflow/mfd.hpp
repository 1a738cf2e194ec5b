#pragma once

#include "vsflow/system.hpp"

namespace vsflow {

/// Per-cell mimetic inner product for face normal velocities, plus the
/// consistency matrices it is built from (in-plane x,z components):
///   N rows: sigma(c,f) * (K n_f)^T        (exact velocities of linear heads)
///   R rows: area(f) * (x_f - x_c)^T       (exact right-hand sides)
/// M = (1/vol) R K^-1 R^T + gamma * (I - N (N^T N)^-1 N^T) is symmetric
/// positive definite and satisfies M N = R (exactness for linear fields).
struct LocalInnerProduct {
    std::size_t nf = 0;
    std::vector<double> M;  // nf x nf, row-major
    std::vector<double> N;  // nf x 2, row-major
    std::vector<double> R;  // nf x 2, row-major
    double gamma = 0.0;

    double m(std::size_t i, std::size_t j) const { return M[i * nf + j]; }
    /// max |M N - R| entry
    double consistency_defect() const;
};

/// stab_scale multiplies the default stabilization weight
/// gamma = trace(consistent part)/nf; exactness holds for any positive value.
LocalInnerProduct build_local_inner_product(const Mesh& mesh, std::size_t cell,
                                            const VgmMaterial& mat, double stab_scale = 1.0);

/// Mixed mimetic finite difference discretization. Unknowns: per-face
/// saturated-driving normal velocity w (m/day along the stored face normal),
/// then per-cell hydraulic head p (m). The physical Darcy velocity is
/// u_f = Kappa_f(q) * w_f; the relative permeability multiplies only the
/// mass-balance and Neumann rows, so the q = 0 system is the symmetric
/// saddle-point saturated problem.
class MfdSystem : public DiscreteSystem {
  public:
    MfdSystem(Mesh mesh, std::vector<VgmMaterial> materials, std::vector<int> cell_materials,
              BoundarySpec bc, SourceField sources, FaceApproximation approx,
              ContinuationKind kind, RelpermModel relperm = RelpermModel::Vgm,
              double stab_scale = 1.0);

    std::size_t size() const override { return nf_ + nc_; }
    using NonlinearSystem::residual;
    void residual(std::span<const double> x, double q, std::span<double> out) const override;
    SparseMatrix jacobian(std::span<const double> x, double q) const override;
    std::vector<double> initial_guess() const override;
    std::vector<double> cell_heads(std::span<const double> x) const override;
    std::vector<double> face_discharge(std::span<const double> x, double q) const override;
    const Mesh& mesh() const override { return mesh_; }
    const std::vector<VgmMaterial>& materials() const override { return mats_; }
    const std::vector<int>& cell_materials() const override { return cmat_; }
    const SourceField& sources() const override { return src_; }

    const std::vector<FaceBc>& face_bc() const override { return fbc_; }
    const std::vector<LocalInnerProduct>& local_matrices() const { return local_; }

    std::size_t face_count() const { return nf_; }
    std::size_t cell_count() const { return nc_; }

    /// Per-face normal velocity w from a state vector.
    std::span<const double> w_part(std::span<const double> x) const { return x.subspan(0, nf_); }
    std::span<const double> p_part(std::span<const double> x) const { return x.subspan(nf_); }

  private:
    /// Continuation-parametrized face relative permeability. Upwinding
    /// selects the donor side by the sign of the face velocity w, the only
    /// choice that keeps Kappa * w continuous where the flow reverses.
    template <class T>
    T face_kappa(const Face& f, double q, T w, T p1, T p2) const;

    Mesh mesh_;
    std::vector<VgmMaterial> mats_;
    std::vector<int> cmat_;
    BoundarySpec bc_;
    SourceField src_;
    FaceApproximation approx_;
    ContinuationKind kind_;
    RelpermModel relperm_;
    std::size_t nf_ = 0;
    std::size_t nc_ = 0;
    std::vector<FaceBc> fbc_;
    std::vector<LocalInnerProduct> local_;
    // Constant (q-independent) part of the flux-block rows:
    // row f: sum_c sigma*(M_c w_hat_c)_f - sum_c sigma*area*p_c  [+ area*h_D]
    struct Triplet {
        std::size_t row, col;
        double val;
    };
    std::vector<Triplet> linear_;        // coefficients of flux rows
    std::vector<double> flux_constant_;  // per flux row: area*h_D on Dirichlet faces
    double start_head_ = 0.0;
};

}  // namespace vsflow
