#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vsflow/vgm.hpp"

using namespace vsflow;

namespace {

// Water-retention test materials (conductivity m/day, alpha 1/m).
VgmMaterial sand() { return make_vgm("sand", 18.144, 3.9, 5.74, 0.154, 0.39); }
VgmMaterial gravel() { return make_vgm("gravel", 8640.0, 490.0, 2.19, 0.011, 0.42); }

}  // namespace

TEST_SUITE("vgm") {

TEST_CASE("material validation") {
    CHECK_THROWS_AS(make_vgm("bad", -1.0, 3.9, 5.74, 0.154, 0.39), std::invalid_argument);
    CHECK_THROWS_AS(make_vgm("bad", 1.0, 0.0, 5.74, 0.154, 0.39), std::invalid_argument);
    CHECK_THROWS_AS(make_vgm("bad", 1.0, 3.9, 1.0, 0.154, 0.39), std::invalid_argument);  // n > 1
    CHECK_THROWS_AS(make_vgm("bad", 1.0, 3.9, 5.74, 0.39, 0.154), std::invalid_argument);
    CHECK_THROWS_AS(make_vgm("bad", 1.0, 3.9, 5.74, 0.154, 1.2), std::invalid_argument);

    const VgmMaterial m = sand();
    CHECK(m.m == doctest::Approx(0.82578397212543554).epsilon(1e-15));
    CHECK(gravel().m == doctest::Approx(0.54337899543378995).epsilon(1e-15));
    CHECK(m.isotropic());
}

TEST_CASE("retention curve against high-precision reference values") {
    const VgmMaterial m = sand();
    // theta(psi = -0.5 m); reference computed with 40-digit arithmetic
    CHECK(water_content(m, -0.5) == doctest::Approx(0.16378297347603119).epsilon(1e-13));
    const double se = effective_saturation(m, water_content(m, -0.5));
    CHECK(se == doctest::Approx(0.041453277440810132).epsilon(1e-13));
    CHECK(kr_of_theta(m, water_content(m, -0.5)) ==
          doctest::Approx(6.2508049680439397e-05).epsilon(1e-12));

    const VgmMaterial g = gravel();
    const double theta_half = g.theta_r + 0.5 * (g.theta_s - g.theta_r);  // Se = 1/2
    CHECK(kr_of_theta(g, theta_half) == doctest::Approx(0.018789114565386402).epsilon(1e-13));
}

TEST_CASE("saturated branch and floor clamp") {
    const VgmMaterial m = sand();
    CHECK(water_content(m, 0.0) == m.theta_s);
    CHECK(water_content(m, 2.5) == m.theta_s);
    CHECK(kr_of_theta(m, m.theta_s) == 1.0);
    CHECK(kr_of_head(m, 4.0, 1.0) == 1.0);  // h - z = 3 >= 0

    // deep suction drives the Mualem value below the floor; it is clamped
    const double theta_dry = water_content(gravel(), -100.0);
    CHECK(kr_of_theta(gravel(), theta_dry) == kKrFloor);

    CHECK_THROWS_AS(effective_saturation(m, m.theta_r - 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(effective_saturation(m, m.theta_s + 1e-6), std::invalid_argument);
}

TEST_CASE("dual numbers obey the chain rule through the retention curve") {
    const VgmMaterial m = sand();
    // seed d(psi) = 1: theta.d is dtheta/dpsi; reference from 40-digit
    // central differencing
    const Dual theta = water_content(m, Dual(-0.5, 1.0));
    CHECK(theta.v == doctest::Approx(0.16378297347603119).epsilon(1e-13));
    CHECK(theta.d == doctest::Approx(0.090778396994089642).epsilon(1e-11));

    // kr_of_head derivative consistent with a tight finite difference
    const Dual kr = kr_of_head(m, Dual(0.25, 1.0), 0.75);
    const double eps = 1e-7;
    const double fd =
        (kr_of_head(m, 0.25 + eps, 0.75) - kr_of_head(m, 0.25 - eps, 0.75)) / (2.0 * eps);
    CHECK(kr.d == doctest::Approx(fd).epsilon(1e-6));

    // arithmetic identities
    const Dual x(3.0, 1.0);
    CHECK((x * x).d == doctest::Approx(6.0));
    CHECK((Dual(1.0) / x).d == doctest::Approx(-1.0 / 9.0));
    CHECK(sqrt(x).d == doctest::Approx(0.5 / std::sqrt(3.0)));
    CHECK(pow(x, 2.5).d == doctest::Approx(2.5 * std::pow(3.0, 1.5)));
    CHECK(abs(Dual(-2.0, 1.0)).d == -1.0);
    CHECK(value_of(x) == 3.0);
}

TEST_CASE("value comparisons freeze branches during differentiation") {
    // upwind-style choice switches on the value, never on the derivative
    const Dual a(1.0, 5.0), b(1.0, -5.0);
    CHECK(a == b);
    CHECK_FALSE(a < b);
    CHECK(Dual(1.0, -100.0) < Dual(2.0, 100.0));
}

TEST_CASE("continuation endpoints are exact") {
    const VgmMaterial m = sand();
    const double kr = kr_of_head(m, 0.3, 0.8);
    REQUIRE(kr > 0.0);
    REQUIRE(kr < 1.0);

    for (ContinuationKind kind : {ContinuationKind::Power, ContinuationKind::Linear}) {
        // bitwise identities, not approximations
        CHECK(continuation_of_kr(kr, 0.0, kind) == 1.0);
        CHECK(continuation_of_kr(kr, 1.0, kind) == kr);
        CHECK(continuation_kr(m, 0.3, 0.8, 0.0, kind) == 1.0);
        CHECK(continuation_kr(m, 0.3, 0.8, 1.0, kind) == kr);
    }

    CHECK(continuation_of_kr(kr, 0.5, ContinuationKind::Power) ==
          doctest::Approx(std::sqrt(kr)).epsilon(1e-15));
    CHECK(continuation_of_kr(kr, 0.5, ContinuationKind::Linear) ==
          doctest::Approx(0.5 * (1.0 + kr)).epsilon(1e-15));

    CHECK_THROWS_AS(continuation_of_kr(kr, -0.1, ContinuationKind::Power), std::invalid_argument);
    CHECK_THROWS_AS(continuation_of_kr(kr, 1.1, ContinuationKind::Power), std::invalid_argument);
}

TEST_CASE("curves are monotone on a sweep") {
    const VgmMaterial g = gravel();
    double prev_theta = -1.0, prev_kr = -1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double psi = -20.0 + 20.5 * i / 2000.0;
        const double theta = water_content(g, psi);
        const double kr = kr_of_theta(g, theta);
        CHECK(theta >= g.theta_r);
        CHECK(theta <= g.theta_s);
        CHECK(kr >= kKrFloor);
        CHECK(kr <= 1.0);
        if (i > 0) {
            CHECK(theta >= prev_theta);
            CHECK(kr >= prev_kr);
        }
        prev_theta = theta;
        prev_kr = kr;
    }
}

}  // TEST_SUITE
