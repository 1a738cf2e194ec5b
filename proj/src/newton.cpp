#include "vsflow/newton.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vsflow {

std::string to_string(NewtonFailure f) {
    switch (f) {
        case NewtonFailure::None: return "none";
        case NewtonFailure::MaxIterations: return "maxit";
        case NewtonFailure::LineSearch: return "linesearch";
        case NewtonFailure::LinearSolve: return "linear-solve";
        case NewtonFailure::NonFinite: return "non-finite";
    }
    return "?";
}

namespace {
bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}
}  // namespace

NewtonReport newton_solve(const NonlinearSystem& system, std::vector<double>& x, double q,
                          const NewtonParams& params) {
    if (x.size() != system.size())
        throw std::invalid_argument("newton_solve: state size mismatch");
    if (params.eps_rel <= 0.0 || params.eps_abs <= 0.0 || params.maxit < 1)
        throw std::invalid_argument("newton_solve: invalid parameters");

    NewtonReport rep;
    std::vector<double> F = system.residual(x, q);
    if (!finite(F)) {
        rep.failure = NewtonFailure::NonFinite;
        return rep;
    }
    double fnorm = norm2(F);
    rep.residual_history.push_back(fnorm);
    const double tol = params.eps_abs + params.eps_rel * fnorm;
    if (fnorm <= tol) {
        rep.converged = true;
        return rep;
    }

    std::vector<double> delta(x.size());
    std::vector<double> rhs(x.size());
    std::vector<double> trial(x.size());
    std::vector<double> Ftrial(x.size());

    for (int it = 1; it <= params.maxit; ++it) {
        const SparseMatrix J = system.jacobian(x, q);
        for (std::size_t i = 0; i < x.size(); ++i) rhs[i] = -F[i];
        std::fill(delta.begin(), delta.end(), 0.0);
        const LinearSolveReport lin = solve(J, rhs, delta, params.linear_rel_tol);
        if (!lin.ok || !finite(delta)) {
            rep.failure = lin.ok ? NewtonFailure::NonFinite : NewtonFailure::LinearSolve;
            return rep;
        }

        double alpha = 1.0;
        if (it <= params.linesearch_skip) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += delta[i];
            system.residual(x, q, F);
            if (!finite(F)) {
                rep.failure = NewtonFailure::NonFinite;
                return rep;
            }
            fnorm = norm2(F);
        } else {
            bool accepted = false;
            for (int bt = 0; bt <= params.max_backtracks; ++bt) {
                for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * delta[i];
                system.residual(trial, q, Ftrial);
                ++rep.linesearch_evals;
                const double tnorm = finite(Ftrial) ? norm2(Ftrial)
                                                    : std::numeric_limits<double>::infinity();
                if (tnorm <= (1.0 - params.armijo_c * alpha) * fnorm) {
                    x = trial;
                    F = Ftrial;
                    fnorm = tnorm;
                    accepted = true;
                    break;
                }
                alpha *= params.backtrack_factor;
            }
            if (!accepted) {
                rep.iterations = it;
                rep.residual_history.push_back(fnorm);
                rep.failure = NewtonFailure::LineSearch;
                return rep;
            }
        }

        rep.iterations = it;
        rep.residual_history.push_back(fnorm);
        if (fnorm <= tol) {
            rep.converged = true;
            return rep;
        }
    }
    rep.failure = NewtonFailure::MaxIterations;
    return rep;
}

}  // namespace vsflow
