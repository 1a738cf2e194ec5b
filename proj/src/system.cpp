#include "vsflow/system.hpp"

#include <stdexcept>

#include "vsflow/tpfa.hpp"

namespace vsflow {

const SideCondition& BoundarySpec::at(Side s) const {
    auto it = sides.find(s);
    if (it == sides.end())
        throw std::invalid_argument("boundary: no condition for side '" + side_name(s) + "'");
    return it->second;
}

std::pair<std::vector<FaceBc>, double> resolve_face_bc(const Mesh& mesh, const BoundarySpec& bc) {
    std::vector<FaceBc> fbc(mesh.faces.size());
    double sum = 0.0;
    std::size_t count = 0;
    for (const Face& f : mesh.faces) {
        if (!f.boundary()) continue;
        const SideCondition& c = bc.at(f.side);
        fbc[f.id].kind = c.kind;
        fbc[f.id].value = c.value(f.centroid);
        if (c.kind == BcKind::Dirichlet) {
            sum += fbc[f.id].value;
            ++count;
        }
    }
    return {std::move(fbc), count ? sum / static_cast<double>(count) : 0.0};
}

double mass_balance_defect(const DiscreteSystem& sys, std::span<const double> x, double q) {
    const std::vector<double> u = sys.face_discharge(x, q);
    double out = 0.0;
    for (const Face& f : sys.mesh().faces)
        if (f.boundary()) out += u[f.id];
    double src = 0.0;
    for (const Cell& c : sys.mesh().cells) src += sys.sources()[c.id] * c.volume;
    return out - src;
}

double total_inflow(const DiscreteSystem& sys, std::span<const double> x, double q) {
    const std::vector<double> u = sys.face_discharge(x, q);
    double in = 0.0;
    for (const Face& f : sys.mesh().faces)
        if (f.boundary() && u[f.id] < 0.0) in -= u[f.id];
    for (const Cell& c : sys.mesh().cells) {
        const double s = sys.sources()[c.id] * c.volume;
        if (s > 0.0) in += s;
    }
    return in;
}

}  // namespace vsflow
