#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "vsflow/linalg.hpp"
#include "vsflow/mesh.hpp"
#include "vsflow/vgm.hpp"

namespace vsflow {

enum class BcKind { Dirichlet, Neumann };

/// Boundary condition for one side of the domain. Dirichlet prescribes the
/// hydraulic head (m); Neumann prescribes the normal flux (m/day), positive
/// = inflow into the domain.
struct SideCondition {
    BcKind kind = BcKind::Neumann;
    std::function<double(const Point&)> value = [](const Point&) { return 0.0; };
};

/// One condition per boundary side; every boundary face gets exactly one.
struct BoundarySpec {
    std::map<Side, SideCondition> sides;

    static SideCondition dirichlet(double head) {
        return {BcKind::Dirichlet, [head](const Point&) { return head; }};
    }
    static SideCondition dirichlet(std::function<double(const Point&)> head) {
        return {BcKind::Dirichlet, std::move(head)};
    }
    static SideCondition neumann(double inflow) {
        return {BcKind::Neumann, [inflow](const Point&) { return inflow; }};
    }

    const SideCondition& at(Side s) const;
};

/// Per-cell specific source Q (1/day, volumetric rate per unit volume).
using SourceField = std::vector<double>;

enum class FaceApproximation { Upwind, Central };

/// Relative permeability model: the van Genuchten-Mualem curves, or the
/// constant-1 override that makes the problem linear for any q.
enum class RelpermModel { Vgm, Unit };

/// Resolved per-boundary-face condition, precomputed at construction.
struct FaceBc {
    BcKind kind = BcKind::Neumann;
    double value = 0.0;  // head (m) or inflow (m/day)
};

/// Resolve the per-face boundary conditions and the mean Dirichlet head used
/// as the constant initial guess.
std::pair<std::vector<FaceBc>, double> resolve_face_bc(const Mesh& mesh, const BoundarySpec& bc);

/// Face relative permeability: upwind takes Kr from the side with the larger
/// head (ties average); central always averages. Used by schemes whose face
/// flux vanishes where the head ordering switches, which keeps the product
/// Kr * flux continuous there.
template <class T>
T face_relperm(T h1, T h2, T kr1, T kr2, FaceApproximation approx) {
    if (approx == FaceApproximation::Central) return T(0.5) * (kr1 + kr2);
    if (h1 > h2) return kr1;
    if (h2 > h1) return kr2;
    return T(0.5) * (kr1 + kr2);
}

/// Face relative permeability for schemes carrying the face velocity as an
/// unknown: upwind takes Kr from the donor side of the velocity w (positive
/// w flows from side 1 to side 2; ties average); central always averages.
/// Selecting on w keeps Kr * w continuous at the switch, where selecting on
/// heads would not (w need not vanish where the head ordering flips).
template <class T>
T donor_relperm(T w, T kr1, T kr2, FaceApproximation approx) {
    if (approx == FaceApproximation::Central) return T(0.5) * (kr1 + kr2);
    if (w > T(0.0)) return kr1;
    if (w < T(0.0)) return kr2;
    return T(0.5) * (kr1 + kr2);
}

/// Evaluator of the continuation problem F(x, q) = 0, q in [0,1]: the
/// minimal interface the Newton corrector and the continuation driver need.
/// Implementations are immutable after construction and shareable across
/// threads.
class NonlinearSystem {
  public:
    virtual ~NonlinearSystem() = default;

    virtual std::size_t size() const = 0;
    virtual void residual(std::span<const double> x, double q, std::span<double> out) const = 0;
    virtual SparseMatrix jacobian(std::span<const double> x, double q) const = 0;

    /// Start vector for the q = 0 solve.
    virtual std::vector<double> initial_guess() const = 0;

    std::vector<double> residual(std::span<const double> x, double q) const {
        std::vector<double> out(size());
        residual(x, q, out);
        return out;
    }
};

/// A NonlinearSystem arising from a discretization on a mesh, with the
/// post-processors the application layer needs. The initial guess is the
/// constant head equal to the mean of the Dirichlet boundary data.
class DiscreteSystem : public NonlinearSystem {
  public:
    virtual std::vector<double> cell_heads(std::span<const double> x) const = 0;

    /// Physical discharge per face (m^3/day) along the stored face normal.
    virtual std::vector<double> face_discharge(std::span<const double> x, double q) const = 0;

    virtual const Mesh& mesh() const = 0;
    virtual const std::vector<VgmMaterial>& materials() const = 0;
    virtual const std::vector<int>& cell_materials() const = 0;
    virtual const SourceField& sources() const = 0;

    /// Resolved boundary condition per face id; entries for interior faces
    /// are present but meaningless.
    virtual const std::vector<FaceBc>& face_bc() const = 0;
};

/// Net boundary balance of a state: sum of outward boundary discharge minus
/// total sources (m^3/day); zero at steady state.
double mass_balance_defect(const DiscreteSystem& sys, std::span<const double> x, double q);

/// Total inflow: positive boundary inflow plus positive sources (m^3/day).
double total_inflow(const DiscreteSystem& sys, std::span<const double> x, double q);

}  // namespace vsflow
