#pragma once

#include <string>
#include <vector>

#include "vsflow/system.hpp"

namespace vsflow {

struct NewtonParams {
    double eps_rel = 1e-5;
    double eps_abs = 1e-5;
    int maxit = 25;
    int linesearch_skip = 5;   // full steps before the line search activates
    double armijo_c = 1e-4;    // sufficient-decrease constant
    double backtrack_factor = 0.5;
    int max_backtracks = 20;
    double linear_rel_tol = 1e-10;
};

enum class NewtonFailure { None, MaxIterations, LineSearch, LinearSolve, NonFinite };

std::string to_string(NewtonFailure f);

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;  // |F| at entry and after each update
    int linesearch_evals = 0;              // residual evaluations inside the line search
    NewtonFailure failure = NewtonFailure::None;
};

/// Damped Newton iteration on F(x, q) = 0 at fixed q:
///   J(x,q) delta = -F(x,q);  x <- x + alpha*delta
/// alpha = 1 for the first linesearch_skip iterations, afterwards Armijo
/// backtracking |F(x+alpha*delta)| <= (1 - armijo_c*alpha)*|F(x)|.
/// Converged when |F(x)| <= eps_abs + eps_rel*|F(x_start)| (2-norm), checked
/// on entry and after each update. Divergence is reported, never thrown.
NewtonReport newton_solve(const NonlinearSystem& system, std::vector<double>& x, double q,
                          const NewtonParams& params);

}  // namespace vsflow
