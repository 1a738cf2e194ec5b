#include "vsflow/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vsflow/mfd.hpp"
#include "vsflow/tpfa.hpp"
#include "vsflow/vtk.hpp"

namespace vsflow {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_dir_name(const ScenarioConfig& cfg) {
    return cfg.name + "-" + to_string(cfg.scheme) + "-p" + std::to_string(cfg.predictor);
}

void write_summary(std::ostream& os, const RunResult& r) {
    const ContinuationTrace& t = r.continuation.trace;
    os << "name " << r.config.name << "\n";
    os << "scheme " << to_string(r.config.scheme) << "\n";
    os << "predictor " << r.config.predictor << "\n";
    os << "status " << (r.success ? "converged" : "failed") << "\n";
    os << "cells " << r.config.nx * r.config.nz << "\n";
    os << "q0_newton_iterations " << t.q0_newton_iterations << "\n";
    os << "successful_steps " << t.successful_steps << "\n";
    os << "failed_steps " << t.failed_steps << "\n";
    os << "total_newton_iterations " << t.total_newton_iterations << "\n";
    os << "total_linesearch_evals " << t.total_linesearch_evals << "\n";
    os << "tangent_solves " << t.tangent_solves << "\n";
    os << "tangent_fallbacks " << t.tangent_fallbacks << "\n";
    if (r.success) {
        os << "polish_iterations " << r.polish_iterations << "\n";
        os << "final_residual_norm " << format_shortest(r.final_residual_norm) << "\n";
        os << "mass_defect " << format_shortest(r.mass_defect) << "\n";
        os << "total_inflow " << format_shortest(r.inflow) << "\n";
    } else {
        os << "last_failed_q " << format_shortest(r.continuation.last_failed_q) << "\n";
    }
}

void write_fields(const std::string& path, const DiscreteSystem& sys,
                  const std::vector<double>& x) {
    const Mesh& mesh = sys.mesh();
    const std::vector<double> h = sys.cell_heads(x);
    std::vector<double> psi(h.size()), theta(h.size()), se(h.size()), kr(h.size());
    for (std::size_t c = 0; c < h.size(); ++c) {
        const VgmMaterial& mat = sys.materials()[sys.cell_materials()[c]];
        psi[c] = h[c] - mesh.cells[c].centroid.z;
        theta[c] = water_content(mat, psi[c]);
        se[c] = effective_saturation(mat, theta[c]);
        kr[c] = kr_of_head(mat, h[c], mesh.cells[c].centroid.z);
    }
    write_vtk_file(path, mesh,
                   {{"head", h},
                    {"capillary_head", psi},
                    {"water_content", theta},
                    {"saturation", se},
                    {"relperm", kr}},
                   sys.cell_materials());
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    RunResult r;
    r.config = cfg;

    const auto t0 = std::chrono::steady_clock::now();
    std::unique_ptr<DiscreteSystem> sys = make_system(cfg);
    r.continuation = continuation_solve(*sys, make_continuation_params(cfg));
    r.success = r.continuation.success;

    if (r.success) {
        r.x = r.continuation.x;
        // Tighten the q = 1 state well past the corrector tolerance so the
        // reported mass balance reflects the discretization, not the solver.
        NewtonParams pp;
        pp.eps_rel = 1e-12;
        pp.eps_abs = 1e-10;
        pp.maxit = 10;
        pp.linesearch_skip = 2;
        pp.linear_rel_tol = 1e-12;
        std::vector<double> xp = r.x;
        const NewtonReport rep = newton_solve(*sys, xp, 1.0, pp);
        const double f_old = norm2(sys->residual(r.x, 1.0));
        const double f_new = norm2(sys->residual(xp, 1.0));
        r.polish_iterations = rep.iterations;
        if (std::isfinite(f_new) && f_new < f_old) {
            r.x = std::move(xp);
            r.final_residual_norm = f_new;
        } else {
            r.final_residual_norm = f_old;
        }
        r.mass_defect = std::abs(mass_balance_defect(*sys, r.x, 1.0));
        r.inflow = total_inflow(*sys, r.x, 1.0);
    }
    r.seconds = seconds_since(t0);

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(out_dir) / run_dir_name(cfg);
        fs::create_directories(dir);
        r.out_path = dir.string();
        {
            std::ofstream os(dir / "trace.csv");
            write_trace_csv(r.continuation.trace, os);
        }
        {
            std::ofstream os(dir / "summary.txt");
            write_summary(os, r);
        }
        if (r.success) {
            write_fields((dir / "fields.vtk").string(), *sys, r.x);
            std::ofstream os(dir / "faces.csv");
            write_faces_csv(os, sys->mesh(), sys->face_discharge(r.x, 1.0));
        }
    }
    return r;
}

std::string compare_table(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(8) << "scheme" << std::setw(11) << "predictor" << std::setw(11)
       << "status" << std::right << std::setw(6) << "steps" << std::setw(8) << "failed"
       << std::setw(8) << "newton" << std::setw(10) << "time[s]" << "\n";
    for (const CompareRow& r : rows) {
        os << std::left << std::setw(8) << to_string(r.scheme) << std::setw(11)
           << (r.predictor == 0 ? "zeroth" : "first") << std::setw(11)
           << (r.success ? "converged" : "failed") << std::right << std::setw(6)
           << r.successful_steps << std::setw(8) << r.failed_steps << std::setw(8)
           << r.newton_iterations << std::setw(10) << std::fixed << std::setprecision(3)
           << r.seconds << "\n";
        os.unsetf(std::ios::fixed);
    }
    return os.str();
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << "scheme,predictor,status,successful_steps,failed_steps,newton_iterations,seconds\n";
    for (const CompareRow& r : rows) {
        os << to_string(r.scheme) << "," << r.predictor << ","
           << (r.success ? "converged" : "failed") << "," << r.successful_steps << ","
           << r.failed_steps << "," << r.newton_iterations << "," << format_shortest(r.seconds)
           << "\n";
    }
}

CompareReport compare_runs(const ScenarioConfig& base, const std::vector<Scheme>& schemes,
                           const std::vector<int>& predictors, const std::string& out_dir) {
    CompareReport report;
    for (Scheme s : schemes) {
        for (int p : predictors) {
            ScenarioConfig cfg = base;
            cfg.scheme = s;
            cfg.predictor = p;
            const RunResult run = run_scenario(cfg, out_dir);
            CompareRow row;
            row.scheme = s;
            row.predictor = p;
            row.success = run.success;
            row.successful_steps = run.continuation.trace.successful_steps;
            row.failed_steps = run.continuation.trace.failed_steps;
            row.newton_iterations = run.continuation.trace.total_newton_iterations;
            row.seconds = run.seconds;
            report.rows.push_back(row);
        }
    }
    report.table = compare_table(report.rows);
    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "compare.csv");
        write_compare_csv(csv, report.rows);
        std::ofstream txt(fs::path(out_dir) / "compare.txt");
        txt << report.table;
    }
    return report;
}

// ---- verification helpers

namespace {

NewtonParams patch_newton_params() {
    NewtonParams p;
    p.eps_rel = 1e-12;
    p.eps_abs = 1e-8;
    p.maxit = 5;
    p.linesearch_skip = 5;
    p.linear_rel_tol = 1e-12;
    return p;
}

}  // namespace

PatchResult tpfa_patch_test(std::size_t nx, std::size_t nz) {
    const double Lx = 1.8, Lz = 1.2;
    const auto exact = [](const Point& p) { return 0.4 + 0.35 * p.x - 0.27 * p.z; };
    const double ux = -2.5 * 0.35, uz = -2.5 * (-0.27);  // u = -K grad h

    Mesh mesh = build_structured_grid(nx, nz, Lx, Lz);
    const VgmMaterial mat = make_vgm("patch-medium", 2.5, 1.5, 2.0, 0.05, 0.35);
    BoundarySpec bc;
    for (Side s : {Side::Left, Side::Right, Side::Bottom, Side::Top})
        bc.sides[s] = BoundarySpec::dirichlet(exact);
    TpfaSystem sys(std::move(mesh), {mat}, std::vector<int>(nx * nz, 0), bc,
                   SourceField(nx * nz, 0.0), FaceApproximation::Upwind, ContinuationKind::Power);

    PatchResult res;
    std::vector<double> x = sys.initial_guess();
    const auto t0 = std::chrono::steady_clock::now();
    const NewtonReport rep = newton_solve(sys, x, 0.0, patch_newton_params());
    res.seconds = seconds_since(t0);
    res.converged = rep.converged;

    for (std::size_t c = 0; c < sys.mesh().cells.size(); ++c)
        res.head_error =
            std::max(res.head_error, std::abs(x[c] - exact(sys.mesh().cells[c].centroid)));
    const std::vector<double> u = sys.face_discharge(x, 0.0);
    for (const Face& f : sys.mesh().faces) {
        const double v_exact = ux * f.normal[0] + uz * f.normal[2];
        res.flux_error = std::max(res.flux_error, std::abs(u[f.id] / f.area - v_exact));
    }
    return res;
}

PatchResult mfd_patch_test(double stab_scale, std::size_t nx, std::size_t nz, double jitter,
                           unsigned seed) {
    const auto exact = [](const Point& p) { return 0.3 + 0.4 * p.x - 0.55 * p.z; };
    const double ux = -0.4, uz = 0.55;  // u = -K grad h, K = 1

    Mesh mesh = build_perturbed_grid(nx, nz, 1.0, 1.0, jitter, seed);
    const VgmMaterial mat = make_vgm("patch-medium", 1.0, 1.5, 2.0, 0.05, 0.35);
    BoundarySpec bc;
    for (Side s : {Side::Left, Side::Right, Side::Bottom, Side::Top})
        bc.sides[s] = BoundarySpec::dirichlet(exact);
    MfdSystem sys(std::move(mesh), {mat}, std::vector<int>(nx * nz, 0), bc,
                  SourceField(nx * nz, 0.0), FaceApproximation::Upwind, ContinuationKind::Power,
                  RelpermModel::Vgm, stab_scale);

    PatchResult res;
    std::vector<double> x = sys.initial_guess();
    const auto t0 = std::chrono::steady_clock::now();
    const NewtonReport rep = newton_solve(sys, x, 0.0, patch_newton_params());
    res.seconds = seconds_since(t0);
    res.converged = rep.converged;

    const std::vector<double> h = sys.cell_heads(x);
    for (std::size_t c = 0; c < sys.mesh().cells.size(); ++c)
        res.head_error =
            std::max(res.head_error, std::abs(h[c] - exact(sys.mesh().cells[c].centroid)));
    const std::vector<double> u = sys.face_discharge(x, 0.0);
    for (const Face& f : sys.mesh().faces) {
        const double v_exact = ux * f.normal[0] + uz * f.normal[2];
        res.flux_error = std::max(res.flux_error, std::abs(u[f.id] / f.area - v_exact));
    }
    return res;
}

std::vector<double> random_heads(const DiscreteSystem& sys, unsigned seed) {
    const Mesh& mesh = sys.mesh();
    const std::size_t nc = mesh.cells.size();
    constexpr double phi = 0.61803398874989484820;
    const double offset = std::fmod(0.37 + 0.129 * static_cast<double>(seed), 1.0);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> noise(-0.004, 0.004);

    std::vector<double> h(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const double t = std::fmod(static_cast<double>(c + 1) * phi + offset, 1.0);
        h[c] = mesh.cells[c].centroid.z - 0.085 - 0.11 * t + noise(rng);
    }

    // Push heads away from upwind ties and Dirichlet data so finite
    // differencing never crosses a branch of the face relperm choice.
    constexpr double margin = 1e-3, bump = 2.5e-3;
    bool changed = true;
    for (int sweep = 0; sweep < 200 && changed; ++sweep) {
        changed = false;
        for (const Face& f : mesh.faces) {
            if (f.boundary()) {
                const FaceBc& bc = sys.face_bc()[f.id];
                if (bc.kind != BcKind::Dirichlet) continue;
                double& hc = h[f.cells[0]];
                if (std::abs(hc - bc.value) < margin) {
                    hc += bump;
                    changed = true;
                }
            } else {
                double& h1 = h[f.cells[0]];
                double& h2 = h[f.cells[1]];
                if (std::abs(h1 - h2) < margin) {
                    (h1 >= h2 ? h1 : h2) += bump;
                    changed = true;
                }
            }
        }
    }
    if (changed) throw std::runtime_error("random_heads: tie repair did not settle");
    for (std::size_t c = 0; c < nc; ++c) {
        const double psi = h[c] - mesh.cells[c].centroid.z;
        if (psi > -0.03 || psi < -0.25)
            throw std::runtime_error("random_heads: capillary head left the smooth range");
    }
    return h;
}

std::vector<double> random_state(const DiscreteSystem& sys, unsigned seed) {
    const std::vector<double> h = random_heads(sys, seed);
    if (const auto* mfd = dynamic_cast<const MfdSystem*>(&sys)) {
        std::vector<double> x(mfd->size());
        std::mt19937 rng(seed + 77);
        std::uniform_real_distribution<double> vel(-1.0, 1.0);
        for (std::size_t f = 0; f < mfd->face_count(); ++f) {
            const double w = vel(rng);
            // keep |w| clear of the donor switch at w = 0
            x[f] = w + (w >= 0.0 ? 3e-3 : -3e-3);
        }
        std::copy(h.begin(), h.end(), x.begin() + static_cast<std::ptrdiff_t>(mfd->face_count()));
        return x;
    }
    return h;
}

double jacobian_fd_error(const NonlinearSystem& sys, const std::vector<double>& x, double q,
                         unsigned seed, double eps) {
    const std::size_t n = sys.size();
    std::mt19937 rng(seed + 101);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& vi : v) vi = dist(rng);

    const SparseMatrix J = sys.jacobian(x, q);
    std::vector<double> jv(n);
    matvec(J, v, jv);

    std::vector<double> xp = x, xm = x;
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] += eps * v[i];
        xm[i] -= eps * v[i];
    }
    const std::vector<double> fp = sys.residual(xp, q);
    const std::vector<double> fm = sys.residual(xm, q);

    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = (fp[i] - fm[i]) / (2.0 * eps) - jv[i];
    const double denom = std::max(norm2(jv), 1e-300);
    return norm2(diff) / denom;
}

bool constitutive_sweep_ok(const VgmMaterial& mat, std::size_t points, std::string* why) {
    const auto fail = [&](const std::string& msg) {
        if (why) *why = mat.name + ": " + msg;
        return false;
    };
    const double lo = -100.0, hi = 2.0;
    double prev_theta = 0.0, prev_kr = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double psi = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double theta = water_content(mat, psi);
        const double kr = kr_of_theta(mat, theta);
        if (!(theta >= mat.theta_r && theta <= mat.theta_s))
            return fail("theta out of range at psi = " + format_shortest(psi));
        if (!(kr >= kKrFloor && kr <= 1.0))
            return fail("kr out of range at psi = " + format_shortest(psi));
        if (i > 0 && theta < prev_theta)
            return fail("theta not monotone at psi = " + format_shortest(psi));
        if (i > 0 && kr < prev_kr) return fail("kr not monotone at psi = " + format_shortest(psi));
        prev_theta = theta;
        prev_kr = kr;
    }
    const double theta0 = water_content(mat, 0.0);
    if (theta0 != mat.theta_s) return fail("theta(0) != theta_s");
    if (kr_of_theta(mat, theta0) != 1.0) return fail("kr at saturation != 1");
    return true;
}

bool verify_all(std::ostream& os) {
    bool all_ok = true;
    const auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        os << (ok ? "ok   " : "FAIL ") << name;
        if (!detail.empty()) os << " (" << detail << ")";
        os << "\n";
        if (!ok) all_ok = false;
    };

    {
        const Mesh m = build_perturbed_grid(8, 8, 1.0, 1.0, 0.2, 3);
        const double c = m.closedness_defect(), l = m.linear_exactness_defect();
        report(c <= 1e-12, "mesh closedness, jittered 8x8", "defect " + format_shortest(c));
        report(l <= 1e-10, "mesh linear exactness, jittered 8x8", "defect " + format_shortest(l));
    }
    {
        const PatchResult r = tpfa_patch_test();
        report(r.converged && r.head_error <= 1e-10 && r.flux_error <= 1e-10,
               "tpfa saturated patch test",
               "head " + format_shortest(r.head_error) + ", flux " +
                   format_shortest(r.flux_error));
    }
    for (double stab : {1.0, 2.0}) {
        const PatchResult r = mfd_patch_test(stab);
        report(r.converged && r.head_error <= 1e-9 && r.flux_error <= 1e-9,
               "mfd saturated patch test, stab x" + format_shortest(stab),
               "head " + format_shortest(r.head_error) + ", flux " +
                   format_shortest(r.flux_error));
    }
    {
        const Mesh m = build_perturbed_grid(8, 8, 1.0, 1.0, 0.2, 3);
        const VgmMaterial mat = make_vgm_diag("aniso", {3.0, 1.0, 0.7}, 1.5, 2.0, 0.05, 0.35);
        double worst = 0.0;
        for (const Cell& c : m.cells)
            worst = std::max(worst, build_local_inner_product(m, c.id, mat).consistency_defect());
        report(worst <= 1e-12, "mfd inner-product consistency", "defect " + format_shortest(worst));
    }
    for (const VgmMaterial& mat : material_library()) {
        std::string why;
        const bool ok = constitutive_sweep_ok(mat, 10000, &why);
        report(ok, "constitutive curves, " + mat.name, why);
    }
    {
        ScenarioConfig cfg = scenario_capillary_barrier(0.5);
        for (Scheme s : {Scheme::Tpfa, Scheme::Mfd}) {
            cfg.scheme = s;
            const std::unique_ptr<DiscreteSystem> sys = make_system(cfg);
            const std::vector<double> x = random_state(*sys, 11);
            for (double q : {0.3, 1.0}) {
                const double err = jacobian_fd_error(*sys, x, q, 11);
                report(err <= 1e-6,
                       "jacobian consistency, " + to_string(s) + ", q = " + format_shortest(q),
                       "rel err " + format_shortest(err));
            }
        }
    }
    return all_ok;
}

}  // namespace vsflow
