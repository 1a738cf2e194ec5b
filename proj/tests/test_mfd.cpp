#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "vsflow/mfd.hpp"
#include "vsflow/newton.hpp"
#include "vsflow/runner.hpp"

using namespace vsflow;

namespace {

VgmMaterial sand() { return make_vgm("sand", 18.144, 3.9, 5.74, 0.154, 0.39); }
VgmMaterial unitk() { return make_vgm("unitk", 1.0, 3.9, 5.74, 0.154, 0.39); }

// unit square, one cell; faces ordered left, right, bottom, top
MfdSystem one_cell(const BoundarySpec& bc) {
    return MfdSystem(build_structured_grid(1, 1, 1.0, 1.0), {unitk()}, {0}, bc, {0.0},
                     FaceApproximation::Upwind, ContinuationKind::Power);
}

}  // namespace

TEST_SUITE("mfd") {

TEST_CASE("inner product on the unit square has the closed-form entries") {
    const Mesh m = build_structured_grid(1, 1, 1.0, 1.0);
    const LocalInnerProduct lip = build_local_inner_product(m, 0, unitk());
    REQUIRE(lip.nf == 4);
    CHECK(lip.gamma == doctest::Approx(0.25).epsilon(1e-14));

    // consistent part R R^T plus 0.25 * projection: pairs of opposite faces
    // couple, orthogonal pairs do not
    const double d = 0.375, o = -0.125;
    const double expect[4][4] = {
        {d, o, 0, 0}, {o, d, 0, 0}, {0, 0, d, o}, {0, 0, o, d}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(lip.m(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-14));
    CHECK(lip.consistency_defect() <= 1e-14);
}

TEST_CASE("inner product is exact, symmetric, and positive definite on distorted cells") {
    const Mesh m = build_grid(3, 3, 1.2, 0.9, -0.04, 0.2, 11);
    const VgmMaterial aniso = make_vgm_diag("aniso", {3.0, 1.0, 0.7}, 3.9, 5.74, 0.154, 0.39);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (const Cell& c : m.cells) {
        const LocalInnerProduct lip = build_local_inner_product(m, c.id, aniso);
        CHECK(lip.consistency_defect() <= 1e-13);
        for (std::size_t i = 0; i < lip.nf; ++i)
            for (std::size_t j = i + 1; j < lip.nf; ++j)
                CHECK(lip.m(i, j) == doctest::Approx(lip.m(j, i)).epsilon(1e-13));
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(lip.nf);
            for (double& v : x) v = u(rng);
            double quad = 0.0;
            for (std::size_t i = 0; i < lip.nf; ++i)
                for (std::size_t j = 0; j < lip.nf; ++j) quad += x[i] * lip.m(i, j) * x[j];
            CHECK(quad > 0.0);
        }
    }
}

TEST_CASE("inner product scales inversely with the conductivity") {
    const Mesh m = build_grid(2, 2, 1.0, 1.0, 0.0, 0.15, 8);
    const VgmMaterial k1 = unitk();
    const VgmMaterial k2 = make_vgm("k2", 2.0, 3.9, 5.74, 0.154, 0.39);
    const LocalInnerProduct a = build_local_inner_product(m, 1, k1);
    const LocalInnerProduct b = build_local_inner_product(m, 1, k2);
    for (std::size_t i = 0; i < a.nf; ++i)
        for (std::size_t j = 0; j < a.nf; ++j)
            CHECK(b.m(i, j) == doctest::Approx(0.5 * a.m(i, j)).epsilon(1e-14));

    // stabilization scaling changes gamma proportionally, exactness survives
    const LocalInnerProduct c = build_local_inner_product(m, 1, k1, 2.0);
    CHECK(c.gamma == doctest::Approx(2.0 * a.gamma).epsilon(1e-14));
    CHECK(c.consistency_defect() <= 1e-13);
}

TEST_CASE("one-cell mixed solve against the hand solution") {
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(1.0);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.0);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.0);
    MfdSystem sys = one_cell(bc);
    REQUIRE(sys.size() == 5);  // 4 face velocities + 1 cell head
    REQUIRE(sys.face_count() == 4);
    REQUIRE(sys.cell_count() == 1);

    // hand-solved saddle system: w = (-1, 1, 0, 0) along the stored normals
    // (left normal points out, so inflow is negative), p = 0.5
    const std::vector<double> exact{-1.0, 1.0, 0.0, 0.0, 0.5};
    const std::vector<double> f1 = sys.residual(exact, 1.0);
    for (double v : f1) CHECK(std::abs(v) <= 1e-14);

    // q = 0 is linear: one Newton step from the constant-head guess
    std::vector<double> x = sys.initial_guess();
    REQUIRE(x.size() == 5);
    CHECK(x[4] == doctest::Approx(0.5));  // mean Dirichlet head
    NewtonParams np;
    np.eps_abs = 1e-12;
    np.eps_rel = 1e-12;
    const NewtonReport rep = newton_solve(sys, x, 0.0, np);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    for (std::size_t i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(exact[i]).epsilon(1e-12));

    // physical discharge through the Dirichlet faces: unit in, unit out
    const std::vector<double> u = sys.face_discharge(x, 0.0);
    CHECK(u[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("prescribed inflow pins the face velocity") {
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(1.0);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.0);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.2);
    MfdSystem sys = one_cell(bc);

    std::vector<double> x = sys.initial_guess();
    NewtonParams np;
    np.eps_abs = 1e-12;
    np.eps_rel = 1e-12;
    const NewtonReport rep = newton_solve(sys, x, 0.0, np);
    REQUIRE(rep.converged);
    // at q = 0 the velocity row reads w + inflow = 0
    CHECK(x[3] == doctest::Approx(-0.2).epsilon(1e-12));
    const std::vector<double> u = sys.face_discharge(x, 0.0);
    CHECK(u[3] == doctest::Approx(-0.2).epsilon(1e-12));  // outward discharge = -inflow
    CHECK(std::abs(mass_balance_defect(sys, x, 0.0)) <= 1e-12);
}

TEST_CASE("constant Dirichlet head is reproduced exactly on distorted meshes") {
    Mesh m = build_grid(5, 4, 2.0, 1.5, -0.05, 0.2, 13);
    BoundarySpec bc;
    for (Side s : {Side::Left, Side::Right, Side::Bottom, Side::Top})
        bc.sides[s] = BoundarySpec::dirichlet(0.7);
    MfdSystem sys(m, {sand()}, std::vector<int>(m.cells.size(), 0), bc,
                  SourceField(m.cells.size(), 0.0), FaceApproximation::Upwind,
                  ContinuationKind::Power);

    // w = 0, p = 0.7 solves the system at every q, including unsaturated
    // cells (their kr multiplies a zero velocity)
    std::vector<double> x(sys.size(), 0.0);
    for (std::size_t c = 0; c < sys.cell_count(); ++c) x[sys.face_count() + c] = 0.7;
    for (double q : {0.0, 0.6, 1.0}) {
        const std::vector<double> f = sys.residual(x, q);
        for (double v : f) CHECK(std::abs(v) <= 1e-14);
    }
}

TEST_CASE("saturated saddle structure at q = 0") {
    Mesh m = build_grid(2, 2, 1.0, 1.0, 0.0, 0.15, 21);
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(0.9);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.3);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.01);
    MfdSystem sys(m, {sand()}, {0, 0, 0, 0}, bc, SourceField(4, 0.0), FaceApproximation::Upwind,
                  ContinuationKind::Power);

    const std::size_t nf = sys.face_count();
    const std::vector<double> x = random_state(sys, 17);
    const SparseMatrix j = sys.jacobian(x, 0.0);

    for (const Face& f : sys.mesh().faces) {
        const bool neumann = f.boundary() && sys.face_bc()[f.id].kind == BcKind::Neumann;
        if (neumann) {
            // velocity is pinned directly: unit diagonal, no head coupling
            CHECK(j.at(f.id, f.id) == doctest::Approx(1.0).epsilon(1e-14));
            for (std::size_t c = 0; c < sys.cell_count(); ++c)
                CHECK(j.at(f.id, nf + c) == 0.0);
        } else {
            // velocity-head blocks are skew adjoints of each other
            for (std::size_t cell : f.cells)
                CHECK(j.at(f.id, nf + cell) ==
                      doctest::Approx(-j.at(nf + cell, f.id)).epsilon(1e-13));
        }
    }
    // velocity-velocity block (the assembled inner product) is symmetric on
    // the flux rows; a pinned Neumann row carries only its unit diagonal even
    // though its column still appears in neighboring flux rows
    const auto pinned = [&](std::size_t id) {
        const Face& f = sys.mesh().faces[id];
        return f.boundary() && sys.face_bc()[id].kind == BcKind::Neumann;
    };
    for (std::size_t a = 0; a < nf; ++a)
        for (std::size_t b = a + 1; b < nf; ++b) {
            if (pinned(a)) CHECK(j.at(a, b) == 0.0);
            if (pinned(b)) CHECK(j.at(b, a) == 0.0);
            if (pinned(a) || pinned(b)) continue;
            CHECK(j.at(a, b) == doctest::Approx(j.at(b, a)).epsilon(1e-13));
        }
}

TEST_CASE("mass rows telescope to the global balance") {
    Mesh m = build_grid(4, 3, 2.0, 1.0, -0.04, 0.15, 6);
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(0.5);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.2);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.015);
    SourceField src(m.cells.size(), 0.0);
    src[3] = 0.05;
    MfdSystem sys(m, {sand()}, std::vector<int>(m.cells.size(), 0), bc, src,
                  FaceApproximation::Upwind, ContinuationKind::Power);

    const std::vector<double> x = random_state(sys, 23);
    const std::vector<double> f = sys.residual(x, 0.7);
    const std::vector<double> u = sys.face_discharge(x, 0.7);

    double mass_sum = 0.0;
    for (std::size_t c = 0; c < sys.cell_count(); ++c) mass_sum += f[sys.face_count() + c];
    double expect = 0.0;
    for (const Face& fc : sys.mesh().faces)
        if (fc.boundary()) expect += u[fc.id];
    for (const Cell& c : sys.mesh().cells) expect -= src[c.id] * c.volume;
    CHECK(mass_sum == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("jacobian matches finite differences on unsaturated states") {
    Mesh m = build_grid(4, 4, 2.0, 1.0, -0.03, 0.12, 31);
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(0.3);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.1);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.008);

    for (FaceApproximation approx : {FaceApproximation::Upwind, FaceApproximation::Central}) {
        MfdSystem sys(m, {sand()}, std::vector<int>(m.cells.size(), 0), bc,
                      SourceField(m.cells.size(), 0.0), approx, ContinuationKind::Power);
        for (unsigned seed : {1u, 2u, 3u}) {
            const std::vector<double> x = random_state(sys, seed);
            CHECK(jacobian_fd_error(sys, x, 0.3, seed) <= 1e-6);
            CHECK(jacobian_fd_error(sys, x, 1.0, seed) <= 1e-6);
        }
    }
}

TEST_CASE("donor upwinding keeps the flux continuous where the flow reverses") {
    // kappa * w must tend to 0 from both sides as w -> 0: the kr jump at the
    // switch multiplies a vanishing velocity
    BoundarySpec bc;
    bc.sides[Side::Left] = BoundarySpec::dirichlet(0.35);
    bc.sides[Side::Right] = BoundarySpec::dirichlet(0.05);
    bc.sides[Side::Bottom] = BoundarySpec::neumann(0.0);
    bc.sides[Side::Top] = BoundarySpec::neumann(0.0);
    Mesh m = build_structured_grid(2, 1, 2.0, 1.0);
    MfdSystem sys(m, {sand()}, {0, 0}, bc, {0.0, 0.0}, FaceApproximation::Upwind,
                  ContinuationKind::Power);

    std::size_t fi = 0;
    for (const Face& f : m.faces)
        if (!f.boundary()) fi = f.id;

    // strongly different saturation on the two sides
    std::vector<double> x(sys.size(), 0.0);
    x[sys.face_count() + 0] = 0.45;  // psi = -0.05
    x[sys.face_count() + 1] = 0.12;  // psi = -0.38

    auto discharge = [&](double w) {
        std::vector<double> s = x;
        s[fi] = w;
        return sys.face_discharge(s, 1.0)[fi];
    };
    const double up = discharge(1e-9);
    const double dn = discharge(-1e-9);
    CHECK(std::abs(up) <= 1e-7);
    CHECK(std::abs(dn) <= 1e-7);
    // and the donor really differs: secants from either side use kr of the
    // approaching side
    const double kr_cell0 = kr_of_head(sand(), 0.45, 0.5);
    const double kr_cell1 = kr_of_head(sand(), 0.12, 0.5);
    CHECK(discharge(0.01) == doctest::Approx(0.01 * kr_cell0 * 1.0).epsilon(1e-12));
    CHECK(discharge(-0.01) == doctest::Approx(-0.01 * kr_cell1 * 1.0).epsilon(1e-12));
}

TEST_CASE("patch test is exact for both stabilization scalings") {
    for (double scale : {1.0, 2.0}) {
        const PatchResult r = mfd_patch_test(scale);
        CHECK(r.converged);
        CHECK(r.head_error <= 1e-9);
        CHECK(r.flux_error <= 1e-9);
    }
}

}  // TEST_SUITE
