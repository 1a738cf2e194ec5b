#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vsflow/continuation.hpp"
#include "vsflow/system.hpp"

namespace vsflow {

/// Region rule as written in a config: assigns a named material to cells
/// whose centroid matches. `band` selects by the layer coordinate
/// eta = z - shear*x (the unsheared elevation), so bands follow the incline;
/// `box` adds an x range. First matching rule wins.
struct RegionSpec {
    enum class Kind { All, Band, Box };
    Kind kind = Kind::All;
    std::string material;
    double emin = 0.0, emax = 0.0;  // eta range, band and box
    double xmin = 0.0, xmax = 0.0;  // box only
};

struct BoundarySideSpec {
    BcKind kind = BcKind::Neumann;
    double value = 0.0;  // head (m) for dirichlet, inflow (m/day) for neumann
};

enum class Scheme { Tpfa, Mfd };

/// Declarative problem definition; round-trips through the text config
/// format unchanged.
struct ScenarioConfig {
    // [mesh]
    std::size_t nx = 1, nz = 1;
    double Lx = 1.0, Lz = 1.0;
    double shear = 0.0;
    double jitter = 0.0;
    unsigned seed = 1;
    // [materials], in declaration order; ids are positions in this list
    std::vector<VgmMaterial> materials;
    // [regions]
    std::vector<RegionSpec> regions;
    // [boundary], keys left/right/bottom/top
    BoundarySideSpec left, right, bottom, top;
    // [source]
    double uniform_source = 0.0;  // 1/day
    // [solver]
    Scheme scheme = Scheme::Tpfa;
    FaceApproximation face_approx = FaceApproximation::Upwind;
    ContinuationKind continuation = ContinuationKind::Power;
    int predictor = 0;
    double eps_rel = 1e-5, eps_abs = 1e-5;
    int maxit = 25;
    int linesearch_skip = 5;
    double dq_min = 1e-4;
    double delta = 1e-7;
    RelpermModel kr_model = RelpermModel::Vgm;
    double mfd_stab_scale = 1.0;
    // [output]
    std::string name = "scenario";
    std::string out_dir = "out";
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_string(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::string& path);

/// Inclined sand-over-gravel infiltration problem: 100 m x 6 m column
/// package sheared by -5% (layers dip toward the right-hand drain), 0.5 m
/// sand band over 0.5 m gravel band at the top of the column, background
/// sand below; 0.0048 m/day top inflow, zero-head bottom and right
/// boundaries. scale 1 -> 100x32 cells; scale 0.5 (desk) -> 100x16.
ScenarioConfig scenario_capillary_barrier(double scale = 0.5);

/// Simplified layered 90 m x 12 m cross-section with six materials and a
/// waste-repository box embedded in the sand layer; 0.0001 m/day top
/// recharge, h = 0.5 m on the other boundaries; jittered grid.
/// scale 1 -> 70x40 cells (2800).
ScenarioConfig scenario_realistic(double scale = 1.0);

/// All distinct named material parameter sets used by the two scenarios.
const std::vector<VgmMaterial>& material_library();

Mesh build_mesh(const ScenarioConfig& cfg);
std::vector<RegionRule> make_region_rules(const ScenarioConfig& cfg);
BoundarySpec make_boundary(const ScenarioConfig& cfg);
std::unique_ptr<DiscreteSystem> make_system(const ScenarioConfig& cfg);
ContinuationParams make_continuation_params(const ScenarioConfig& cfg);

std::string to_string(Scheme s);

/// Shortest decimal string that round-trips the value exactly.
std::string format_shortest(double v);

}  // namespace vsflow
