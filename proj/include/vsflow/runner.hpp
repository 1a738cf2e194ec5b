#pragma once

#include <iosfwd>

#include "vsflow/scenario.hpp"

namespace vsflow {

struct RunResult {
    ScenarioConfig config;
    bool success = false;
    ContinuationResult continuation;
    std::vector<double> x;  // final state (tightened at q = 1) when success
    int polish_iterations = 0;     // extra Newton iterations outside the step tallies
    double final_residual_norm = 0.0;
    double mass_defect = 0.0;  // |sum of boundary discharge - sum of sources|, m^3/day
    double inflow = 0.0;       // total inflow, m^3/day
    double seconds = 0.0;
    std::string out_path;  // directory written; empty when output was suppressed
};

/// Runs continuation for the configured scheme/predictor. On success the
/// q = 1 solution is tightened by a few extra Newton iterations (reported
/// separately, outside the continuation tallies) so the emitted fields
/// satisfy discrete mass balance to solver precision rather than to the
/// corrector tolerance. Writes fields.vtk, faces.csv, trace.csv and
/// summary.txt into <out_dir>/<name>-<scheme>-p<predictor>/ unless out_dir
/// is empty; all written files are deterministic (bit-identical reruns).
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

struct CompareRow {
    Scheme scheme = Scheme::Tpfa;
    int predictor = 0;
    bool success = false;
    int successful_steps = 0;
    int failed_steps = 0;
    int newton_iterations = 0;  // q0 solve + all attempted steps
    double seconds = 0.0;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::string table;  // aligned text
};

/// Runs every (scheme, predictor) combination of one scenario and tabulates
/// steps/iterations/time. Each run writes to its own subdirectory of
/// out_dir (pass "" to suppress output files).
CompareReport compare_runs(const ScenarioConfig& base, const std::vector<Scheme>& schemes,
                           const std::vector<int>& predictors, const std::string& out_dir);

std::string compare_table(const std::vector<CompareRow>& rows);
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

// ---- verification helpers (shared by unit tests, acceptance, and the CLI)

struct PatchResult {
    double head_error = 0.0;
    double flux_error = 0.0;  // velocity units, m/day
    double seconds = 0.0;
    bool converged = false;
};

/// Saturated (q = 0) patch test: TPFA on an unsheared grid, constant
/// isotropic K, linear Dirichlet head data; exact up to solver roundoff.
PatchResult tpfa_patch_test(std::size_t nx = 9, std::size_t nz = 7);

/// Saturated patch test: MFD on a jitter-perturbed quadrilateral grid;
/// exact for any positive stabilization scaling.
PatchResult mfd_patch_test(double stab_scale, std::size_t nx = 8, std::size_t nz = 8,
                           double jitter = 0.2, unsigned seed = 3);

/// Deterministic head field with pairwise-distinct neighbor values (no
/// upwind ties), heads clear of Dirichlet data and of the saturation kink,
/// and capillary pressures inside the smooth range of all materials.
std::vector<double> random_heads(const DiscreteSystem& sys, unsigned seed);

/// Full random state for a system: heads for TPFA; face velocities + heads
/// for MFD.
std::vector<double> random_state(const DiscreteSystem& sys, unsigned seed);

/// Directional-derivative Jacobian check: relative 2-norm error between
/// (F(x + eps v) - F(x - eps v))/(2 eps) and J v for a deterministic random
/// direction v.
double jacobian_fd_error(const NonlinearSystem& sys, const std::vector<double>& x, double q,
                         unsigned seed, double eps = 1e-6);

/// Sweeps the retention and relative-permeability curves over `points`
/// capillary pressures in [-100, 2] m and checks monotonicity and range
/// (theta in [theta_r, theta_s], kr in [floor, 1], both nondecreasing in
/// psi). On failure, *why describes the first violation.
bool constitutive_sweep_ok(const VgmMaterial& mat, std::size_t points, std::string* why = nullptr);

/// Analytic and patch-test suite; prints one line per check, returns false
/// if any check fails.
bool verify_all(std::ostream& os);

}  // namespace vsflow
