#include "vsflow/continuation.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace vsflow {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

TangentVector compute_tangent(const NonlinearSystem& system, const std::vector<double>& x,
                              double q, double delta, double linear_rel_tol) {
    TangentVector tv;
    std::vector<double> f0 = system.residual(x, q);
    std::vector<double> f1 = system.residual(x, q + delta);
    std::vector<double> rhs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rhs[i] = -(f1[i] - f0[i]) / delta;

    const SparseMatrix J = system.jacobian(x, q);
    tv.t.assign(x.size(), 0.0);
    const LinearSolveReport rep = solve(J, rhs, tv.t, linear_rel_tol);
    tv.ok = rep.ok;
    if (tv.ok)
        for (double v : tv.t)
            if (!std::isfinite(v)) {
                tv.ok = false;
                break;
            }
    return tv;
}

std::vector<double> predict_zeroth(const std::vector<double>& x) { return x; }

std::vector<double> predict_first(const std::vector<double>& x, const std::vector<double>& t,
                                  double dq) {
    std::vector<double> out(x);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += dq * t[i];
    return out;
}

ContinuationResult continuation_solve(const NonlinearSystem& system,
                                      const ContinuationParams& params) {
    const Corrector newton = [&](std::vector<double>& x, double, double q_target) {
        return newton_solve(system, x, q_target, params.newton);
    };
    return continuation_solve(system, params, newton);
}

ContinuationResult continuation_solve(const NonlinearSystem& system,
                                      const ContinuationParams& params,
                                      const Corrector& corrector) {
    const auto run_start = std::chrono::steady_clock::now();
    ContinuationResult res;
    ContinuationTrace& trace = res.trace;

    std::vector<double> x = system.initial_guess();
    const NewtonReport rep0 = corrector(x, 0.0, 0.0);
    trace.q0_newton_iterations = rep0.iterations;
    trace.total_newton_iterations = rep0.iterations;
    trace.total_linesearch_evals = rep0.linesearch_evals;
    if (!rep0.converged) {
        res.last_failed_q = 0.0;
        trace.total_seconds = seconds_since(run_start);
        return res;
    }

    double q = 0.0;
    double dq_last = 1.0;
    TangentVector tangent;
    bool tangent_ready = false;

    while (q < 1.0) {
        double dq = std::min(1.0 - q, 2.0 * dq_last);
        bool accepted = false;
        while (dq > params.dq_min) {
            const double q_target = dq >= 1.0 - q ? 1.0 : q + dq;
            const double dq_actual = q_target - q;

            std::vector<double> x0 = x;
            if (params.predictor_order == 1) {
                if (!tangent_ready) {
                    tangent = compute_tangent(system, x, q, params.delta,
                                              params.newton.linear_rel_tol);
                    tangent_ready = true;
                    if (tangent.ok)
                        ++trace.tangent_solves;
                    else
                        ++trace.tangent_fallbacks;
                }
                if (tangent.ok) x0 = predict_first(x, tangent.t, dq_actual);
            }

            const auto t0 = std::chrono::steady_clock::now();
            const NewtonReport rep = corrector(x0, q, q_target);
            StepRecord rec;
            rec.q_target = q_target;
            rec.dq = dq_actual;
            rec.accepted = rep.converged;
            rec.newton_iterations = rep.iterations;
            rec.linesearch_evals = rep.linesearch_evals;
            rec.failure = rep.failure;
            rec.seconds = seconds_since(t0);
            trace.steps.push_back(rec);
            trace.total_newton_iterations += rep.iterations;
            trace.total_linesearch_evals += rep.linesearch_evals;

            if (rep.converged) {
                ++trace.successful_steps;
                x = std::move(x0);
                q = q_target;
                dq_last = dq_actual;
                tangent_ready = false;
                accepted = true;
                break;
            }
            ++trace.failed_steps;
            res.last_failed_q = q_target;
            dq *= 0.5;
        }
        if (!accepted) {
            trace.total_seconds = seconds_since(run_start);
            return res;
        }
    }

    res.success = true;
    res.x = std::move(x);
    res.last_failed_q = -1.0;
    trace.total_seconds = seconds_since(run_start);
    return res;
}

void write_trace_csv(const ContinuationTrace& trace, std::ostream& os) {
    os << std::setprecision(17);
    os << "step,q_target,dq,accepted,newton_iterations,linesearch_evals,failure\n";
    std::size_t i = 1;
    for (const StepRecord& s : trace.steps) {
        os << i++ << ',' << s.q_target << ',' << s.dq << ',' << (s.accepted ? 1 : 0) << ','
           << s.newton_iterations << ',' << s.linesearch_evals << ','
           << (s.accepted ? "none" : to_string(s.failure)) << '\n';
    }
}

}  // namespace vsflow
