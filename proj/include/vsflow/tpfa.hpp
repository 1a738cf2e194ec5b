#pragma once

#include "vsflow/system.hpp"

namespace vsflow {

/// One-sided transmissibility area(f)*(n^T K n)/dist with dist the distance
/// from the cell centroid to the face plane along the normal (m^2/day).
double half_transmissibility(const Mesh& mesh, std::size_t cell, std::size_t face,
                             const VgmMaterial& mat);

/// Harmonic average of the two one-sided transmissibilities.
double face_transmissibility(double t1, double t2);

/// Cell-centered two-point flux approximation of the steady Richards
/// equation in head form. Unknowns: one hydraulic head per cell.
class TpfaSystem : public DiscreteSystem {
  public:
    TpfaSystem(Mesh mesh, std::vector<VgmMaterial> materials, std::vector<int> cell_materials,
               BoundarySpec bc, SourceField sources, FaceApproximation approx,
               ContinuationKind kind, RelpermModel relperm = RelpermModel::Vgm);

    std::size_t size() const override { return mesh_.cells.size(); }
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

  private:
    template <class T>
    T flux(const Face& f, double q, T h1, T h2) const;

    Mesh mesh_;
    std::vector<VgmMaterial> mats_;
    std::vector<int> cmat_;
    BoundarySpec bc_;
    SourceField src_;
    FaceApproximation approx_;
    ContinuationKind kind_;
    RelpermModel relperm_;
    std::vector<FaceBc> fbc_;    // per face; meaningful on boundary faces
    std::vector<double> trans_;  // per face: harmonic (interior) or half (Dirichlet)
    double start_head_ = 0.0;
};

}  // namespace vsflow
