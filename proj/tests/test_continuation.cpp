#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "vsflow/continuation.hpp"

using namespace vsflow;

namespace {

// scalar F(x, q) = x - q: tangent dx/dq = 1, handy for predictor checks
struct LinearTrackSystem : NonlinearSystem {
    std::size_t size() const override { return 1; }
    using NonlinearSystem::residual;
    void residual(std::span<const double> x, double q, std::span<double> out) const override {
        out[0] = x[0] - q;
    }
    SparseMatrix jacobian(std::span<const double>, double) const override {
        SparseBuilder b(1);
        b.add(0, 0, 1.0);
        return b.compress();
    }
    std::vector<double> initial_guess() const override { return {0.0}; }
};

// same track but with an everywhere-singular jacobian: the tangent solve
// must fail and the driver must fall back to zeroth-order prediction
struct SingularTrackSystem : LinearTrackSystem {
    SparseMatrix jacobian(std::span<const double>, double) const override {
        SparseBuilder b(1);
        b.add(0, 0, 0.0);
        return b.compress();
    }
};

// x(q) = e^q: F(x, q) = x^3 - e^{3q}, dF/dx = 3x^2
struct ExpTrackSystem : NonlinearSystem {
    std::size_t size() const override { return 1; }
    using NonlinearSystem::residual;
    void residual(std::span<const double> x, double q, std::span<double> out) const override {
        out[0] = x[0] * x[0] * x[0] - std::exp(3.0 * q);
    }
    SparseMatrix jacobian(std::span<const double> x, double) const override {
        SparseBuilder b(1);
        b.add(0, 0, 3.0 * x[0] * x[0]);
        return b.compress();
    }
    std::vector<double> initial_guess() const override { return {1.0}; }
};

NewtonReport ok_report(int its) {
    NewtonReport r;
    r.converged = true;
    r.iterations = its;
    r.residual_history.assign(static_cast<std::size_t>(its) + 1, 0.0);
    return r;
}

NewtonReport fail_report(int its) {
    NewtonReport r;
    r.converged = false;
    r.iterations = its;
    r.failure = NewtonFailure::MaxIterations;
    return r;
}

// corrector accepting only steps of at most max_dq; rejected steps leave x
// untouched, accepted ones land exactly on the track x = q
Corrector cautious_corrector(double max_dq, std::vector<double>* seen_predictions = nullptr) {
    return [max_dq, seen_predictions](std::vector<double>& x, double q_base,
                                      double q_target) -> NewtonReport {
        if (q_target == 0.0) {  // the q = 0 solve always lands on the track
            x.assign(1, 0.0);
            return ok_report(2);
        }
        if (seen_predictions) seen_predictions->push_back(x[0]);
        if (q_target - q_base > max_dq + 1e-12) return fail_report(3);
        x.assign(1, q_target);
        return ok_report(2);
    };
}

double fitted_slope(const std::vector<double>& dq, const std::vector<double>& err) {
    // least-squares slope of log(err) against log(dq)
    const std::size_t n = dq.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(dq[i]);
        const double ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("continuation") {

TEST_CASE("tangent of the linear track is exact") {
    LinearTrackSystem sys;
    const std::vector<double> x{0.4};
    const TangentVector tv = compute_tangent(sys, x, 0.4, 1e-7);
    REQUIRE(tv.ok);
    CHECK(tv.t[0] == doctest::Approx(1.0).epsilon(1e-9));

    const std::vector<double> p0 = predict_zeroth(x);
    CHECK(p0[0] == 0.4);
    const std::vector<double> p1 = predict_first(x, tv.t, 0.1);
    CHECK(p1[0] == doctest::Approx(0.5).epsilon(1e-9));

    SingularTrackSystem sing;
    CHECK_FALSE(compute_tangent(sing, x, 0.4, 1e-7).ok);
}

TEST_CASE("single full-range step when the corrector always succeeds") {
    LinearTrackSystem sys;
    ContinuationParams p;
    const ContinuationResult res = continuation_solve(sys, p, cautious_corrector(2.0));
    CHECK(res.success);
    REQUIRE(res.trace.steps.size() == 1);
    CHECK(res.trace.steps[0].q_target == 1.0);  // the endpoint is hit exactly
    CHECK(res.trace.steps[0].dq == 1.0);
    CHECK(res.trace.successful_steps == 1);
    CHECK(res.trace.failed_steps == 0);
    CHECK(res.trace.q0_newton_iterations == 2);
    // q0 solve (2) + one step (2)
    CHECK(res.trace.total_newton_iterations == 4);
    CHECK(res.x[0] == 1.0);
    CHECK(res.last_failed_q == -1.0);
}

TEST_CASE("step doubling and halving against a scripted corrector") {
    // accepts at most dq = 0.25: the driver probes 1, 0.5, 0.25 (accept),
    // then doubles after every acceptance and halves after every rejection
    LinearTrackSystem sys;
    ContinuationParams p;
    const ContinuationResult res = continuation_solve(sys, p, cautious_corrector(0.25));
    CHECK(res.success);

    std::vector<double> got_dq;
    for (const StepRecord& s : res.trace.steps) got_dq.push_back(s.dq);
    const std::vector<double> expect_dq{1.0, 0.5, 0.25, 0.5, 0.25, 0.5, 0.25, 0.25};
    CHECK(got_dq == expect_dq);

    const std::vector<bool> expect_acc{false, false, true, false, true, false, true, true};
    REQUIRE(res.trace.steps.size() == expect_acc.size());
    for (std::size_t i = 0; i < expect_acc.size(); ++i)
        CHECK(res.trace.steps[i].accepted == expect_acc[i]);

    // accepted targets 0.25, 0.5, 0.75, then exactly 1.0
    std::vector<double> accepted;
    for (const StepRecord& s : res.trace.steps)
        if (s.accepted) accepted.push_back(s.q_target);
    CHECK(accepted == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    CHECK(accepted.back() == 1.0);

    CHECK(res.trace.successful_steps == 4);
    CHECK(res.trace.failed_steps == 4);
    // q0 (2) + 4 failures (3 each) + 4 acceptances (2 each)
    CHECK(res.trace.total_newton_iterations == 2 + 4 * 3 + 4 * 2);
}

TEST_CASE("run fails once the step would fall below the minimum") {
    LinearTrackSystem sys;
    ContinuationParams p;  // dq_min = 1e-4
    const ContinuationResult res = continuation_solve(sys, p, cautious_corrector(-1.0));
    CHECK_FALSE(res.success);
    // dq = 2^0 ... 2^-13 are attempted; 2^-14 would be below the floor
    CHECK(res.trace.steps.size() == 14);
    CHECK(res.trace.failed_steps == 14);
    CHECK(res.trace.successful_steps == 0);
    CHECK(res.trace.steps.front().dq == 1.0);
    CHECK(res.trace.steps.back().dq == doctest::Approx(std::pow(2.0, -13)).epsilon(1e-15));
    CHECK(res.last_failed_q == doctest::Approx(std::pow(2.0, -13)).epsilon(1e-15));
    for (const StepRecord& s : res.trace.steps) CHECK_FALSE(s.accepted);
}

TEST_CASE("a corrector failure at q = 0 aborts the run before any step") {
    LinearTrackSystem sys;
    ContinuationParams p;
    const Corrector never = [](std::vector<double>&, double, double) { return fail_report(7); };
    const ContinuationResult res = continuation_solve(sys, p, never);
    CHECK_FALSE(res.success);
    CHECK(res.trace.steps.empty());
    CHECK(res.trace.q0_newton_iterations == 7);
    CHECK(res.trace.total_newton_iterations == 7);
    CHECK(res.last_failed_q == 0.0);
}

TEST_CASE("first-order prediction: one tangent per base, reused across halvings") {
    LinearTrackSystem sys;
    ContinuationParams p;
    p.predictor_order = 1;
    std::vector<double> seen;
    const ContinuationResult res = continuation_solve(sys, p, cautious_corrector(0.25, &seen));
    CHECK(res.success);

    // four bases (0, 0.25, 0.5, 0.75) each consumed exactly one tangent
    // solve, shared by every attempt from that base
    CHECK(res.trace.tangent_solves == 4);
    CHECK(res.trace.tangent_fallbacks == 0);

    // the corrector received x_base + dq * t with t = 1: exactly the target
    const std::vector<double> expect{1.0, 0.5, 0.25, 0.75, 0.5, 1.0, 0.75, 1.0};
    REQUIRE(seen.size() == expect.size());
    for (std::size_t i = 0; i < seen.size(); ++i)
        CHECK(seen[i] == doctest::Approx(expect[i]).epsilon(1e-7));
}

TEST_CASE("tangent solve failure falls back to zeroth-order prediction") {
    SingularTrackSystem sys;
    ContinuationParams p;
    p.predictor_order = 1;
    std::vector<double> seen;
    const ContinuationResult res = continuation_solve(sys, p, cautious_corrector(0.25, &seen));
    CHECK(res.success);
    CHECK(res.trace.tangent_solves == 0);
    CHECK(res.trace.tangent_fallbacks == 4);

    // predictions collapse to the base point
    const std::vector<double> expect{0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75};
    REQUIRE(seen.size() == expect.size());
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == expect[i]);
}

TEST_CASE("predictor orders show their convergence rates on a smooth track") {
    // exact solution x(q) = e^q; compare predictions from q = 0.3 with the
    // true solution at q + dq
    ExpTrackSystem sys;
    const double q0 = 0.3;
    const std::vector<double> base{std::exp(q0)};
    const TangentVector tv = compute_tangent(sys, base, q0, 1e-7);
    REQUIRE(tv.ok);
    CHECK(tv.t[0] == doctest::Approx(std::exp(q0)).epsilon(1e-6));

    const std::vector<double> dqs{0.2, 0.1, 0.05, 0.025};
    std::vector<double> err0, err1;
    for (double dq : dqs) {
        const double truth = std::exp(q0 + dq);
        err0.push_back(std::abs(predict_zeroth(base)[0] - truth));
        err1.push_back(std::abs(predict_first(base, tv.t, dq)[0] - truth));
    }
    const double slope0 = fitted_slope(dqs, err0);
    const double slope1 = fitted_slope(dqs, err1);
    CHECK(slope0 >= 0.8);
    CHECK(slope0 <= 1.2);
    CHECK(slope1 >= 1.8);
}

TEST_CASE("full pipeline on the smooth track converges with both predictors") {
    ExpTrackSystem sys;
    for (int order : {0, 1}) {
        ContinuationParams p;
        p.predictor_order = order;
        p.newton.eps_abs = 1e-12;
        p.newton.eps_rel = 1e-12;
        const ContinuationResult res = continuation_solve(sys, p);
        CHECK(res.success);
        REQUIRE(res.x.size() == 1);
        CHECK(res.x[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
        if (order == 1) CHECK(res.trace.tangent_solves == res.trace.successful_steps);
    }
}

TEST_CASE("trace serialization is deterministic and timing-free") {
    ContinuationTrace tr;
    StepRecord a;
    a.q_target = 1.0;
    a.dq = 1.0;
    a.accepted = false;
    a.newton_iterations = 3;
    a.linesearch_evals = 2;
    a.failure = NewtonFailure::MaxIterations;
    a.seconds = 123.0;  // must not appear in the output
    StepRecord b;
    b.q_target = 0.5;
    b.dq = 0.5;
    b.accepted = true;
    b.newton_iterations = 4;
    b.failure = NewtonFailure::None;
    tr.steps = {a, b};

    std::ostringstream os;
    write_trace_csv(tr, os);
    CHECK(os.str() ==
          "step,q_target,dq,accepted,newton_iterations,linesearch_evals,failure\n"
          "1,1,1,0,3,2,maxit\n"
          "2,0.5,0.5,1,4,0,none\n");
}

}  // TEST_SUITE
