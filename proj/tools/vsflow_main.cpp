// Command-line front end: solve one scenario, compare discretizations and
// predictors, run the verification suite, or emit a built-in scenario config.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vsflow/runner.hpp"

namespace {

vsflow::ScenarioConfig builtin_scenario(const std::string& name, double scale) {
    if (name == "capillary") return vsflow::scenario_capillary_barrier(scale > 0 ? scale : 0.5);
    if (name == "realistic") return vsflow::scenario_realistic(scale > 0 ? scale : 1.0);
    throw CLI::ValidationError("--scenario", "unknown scenario '" + name + "'");
}

void print_run(const vsflow::RunResult& r) {
    const vsflow::ContinuationTrace& t = r.continuation.trace;
    std::cout << r.config.name << " [" << vsflow::to_string(r.config.scheme) << ", "
              << (r.config.predictor == 0 ? "zeroth" : "first") << "-order predictor]: "
              << (r.success ? "converged" : "FAILED") << "\n";
    std::cout << "  steps " << t.successful_steps << " (+" << t.failed_steps << " failed), newton "
              << t.total_newton_iterations << " (incl. " << t.q0_newton_iterations
              << " at q=0), tangent solves " << t.tangent_solves << "\n";
    if (r.success) {
        std::cout << "  mass defect " << vsflow::format_shortest(r.mass_defect) << " m^3/day of "
                  << vsflow::format_shortest(r.inflow) << " m^3/day inflow\n";
    } else {
        std::cout << "  last failed q " << vsflow::format_shortest(r.continuation.last_failed_q)
                  << "\n";
    }
    std::cout << "  wall time " << vsflow::format_shortest(r.seconds) << " s\n";
    if (!r.out_path.empty()) std::cout << "  wrote " << r.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state variably saturated groundwater flow solver"};
    app.require_subcommand(1);

    // --- solve
    std::string solve_config, solve_out = "out", solve_scheme, solve_pred;
    auto* solve = app.add_subcommand("solve", "run one continuation solve from a config file");
    solve->add_option("-c,--config", solve_config, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    solve->add_option("-o,--out", solve_out, "output directory (default: out)");
    solve->add_option("--scheme", solve_scheme, "override scheme: tpfa or mfd")
        ->check(CLI::IsMember({"tpfa", "mfd"}));
    solve->add_option("--predictor", solve_pred, "override predictor order: 0 or 1")
        ->check(CLI::IsMember({"0", "1"}));

    // --- compare
    std::string cmp_scenario, cmp_config, cmp_out = "out";
    double cmp_scale = 0.0;
    auto* compare =
        app.add_subcommand("compare", "run every scheme x predictor combination and tabulate");
    auto* cmp_sc = compare->add_option("-s,--scenario", cmp_scenario,
                                       "built-in scenario: capillary or realistic")
                       ->check(CLI::IsMember({"capillary", "realistic"}));
    auto* cmp_cf = compare->add_option("-c,--config", cmp_config, "scenario config file")
                       ->check(CLI::ExistingFile);
    compare->add_option("--scale", cmp_scale, "mesh refinement factor for built-in scenarios")
        ->check(CLI::PositiveNumber);
    compare->add_option("-o,--out", cmp_out, "output directory (default: out)");
    cmp_sc->excludes(cmp_cf);

    // --- verify
    auto* verify = app.add_subcommand("verify", "run the analytic and patch-test suite");

    // --- init
    std::string init_scenario = "capillary", init_path = "scenario.ini";
    double init_scale = 0.0;
    auto* init = app.add_subcommand("init", "write a built-in scenario config file");
    init->add_option("-s,--scenario", init_scenario, "capillary or realistic")
        ->check(CLI::IsMember({"capillary", "realistic"}));
    init->add_option("--scale", init_scale, "mesh refinement factor")
        ->check(CLI::PositiveNumber);
    init->add_option("-o,--out", init_path, "config file to write (default: scenario.ini)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            vsflow::ScenarioConfig cfg = vsflow::load_config(solve_config);
            if (solve_scheme == "tpfa") cfg.scheme = vsflow::Scheme::Tpfa;
            if (solve_scheme == "mfd") cfg.scheme = vsflow::Scheme::Mfd;
            if (!solve_pred.empty()) cfg.predictor = std::stoi(solve_pred);
            const vsflow::RunResult r = vsflow::run_scenario(cfg, solve_out);
            print_run(r);
            return r.success ? 0 : 2;
        }
        if (compare->parsed()) {
            if (cmp_scenario.empty() && cmp_config.empty())
                throw CLI::ValidationError("compare", "pass --scenario or --config");
            const vsflow::ScenarioConfig base = cmp_config.empty()
                                                    ? builtin_scenario(cmp_scenario, cmp_scale)
                                                    : vsflow::load_config(cmp_config);
            const vsflow::CompareReport rep =
                vsflow::compare_runs(base, {vsflow::Scheme::Tpfa, vsflow::Scheme::Mfd}, {0, 1},
                                     cmp_out);
            std::cout << rep.table;
            for (const vsflow::CompareRow& row : rep.rows)
                if (!row.success) return 2;
            return 0;
        }
        if (verify->parsed()) return vsflow::verify_all(std::cout) ? 0 : 1;
        if (init->parsed()) {
            vsflow::save_config(builtin_scenario(init_scenario, init_scale), init_path);
            std::cout << "wrote " << init_path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
