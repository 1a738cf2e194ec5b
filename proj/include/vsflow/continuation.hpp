#pragma once

#include <functional>
#include <iosfwd>

#include "vsflow/newton.hpp"

namespace vsflow {

struct ContinuationParams {
    int predictor_order = 0;  // 0: copy the last solution; 1: Euler step along dx/dq
    double dq_min = 1e-4;     // run fails once the step would shrink to or below this
    double delta = 1e-7;      // finite-difference step in q for the tangent right-hand side
    ContinuationKind kind = ContinuationKind::Power;
    NewtonParams newton;
};

struct StepRecord {
    double q_target = 0.0;
    double dq = 0.0;
    bool accepted = false;
    int newton_iterations = 0;
    int linesearch_evals = 0;
    NewtonFailure failure = NewtonFailure::None;
    double seconds = 0.0;  // wall time; excluded from serialized output
};

struct ContinuationTrace {
    int q0_newton_iterations = 0;  // the q = 0 solve, outside the step tally
    std::vector<StepRecord> steps;
    int successful_steps = 0;
    int failed_steps = 0;
    int total_newton_iterations = 0;  // q0 solve + every attempted step
    int total_linesearch_evals = 0;
    int tangent_solves = 0;  // one per accepted step on successful first-order runs
    int tangent_fallbacks = 0;
    double total_seconds = 0.0;
};

struct ContinuationResult {
    bool success = false;
    std::vector<double> x;  // solution at q = 1 when success
    double last_failed_q = -1.0;
    ContinuationTrace trace;
};

/// Corrector contract: improve x in place toward F(x, q_target) = 0 and
/// report. The default corrector is newton_solve; tests inject scripted ones.
using Corrector =
    std::function<NewtonReport(std::vector<double>& x, double q_base, double q_target)>;

struct TangentVector {
    std::vector<double> t;  // dx/dq
    bool ok = false;
};

/// Solve J(x,q) t = -(F(x,q+delta) - F(x,q))/delta for the solution
/// sensitivity dx/dq at a converged base solution.
TangentVector compute_tangent(const NonlinearSystem& system, const std::vector<double>& x,
                              double q, double delta, double linear_rel_tol = 1e-10);

std::vector<double> predict_zeroth(const std::vector<double>& x);
std::vector<double> predict_first(const std::vector<double>& x, const std::vector<double>& t,
                                  double dq);

/// Nonlinearity continuation in predictor-corrector form: solve at q = 0
/// from the constant-head guess, then advance q by
/// dq = min(1 - q, 2*dq_last), halving dq on corrector failure and failing
/// the run when dq falls to dq_min without an acceptance. The tangent of a
/// base solution is computed once, on first use, and reused across halvings;
/// if its linear solve fails, that step falls back to the zeroth-order
/// prediction.
ContinuationResult continuation_solve(const NonlinearSystem& system,
                                      const ContinuationParams& params);
ContinuationResult continuation_solve(const NonlinearSystem& system,
                                      const ContinuationParams& params,
                                      const Corrector& corrector);

/// One row per attempted step; deterministic (no timing columns).
void write_trace_csv(const ContinuationTrace& trace, std::ostream& os);

}  // namespace vsflow
