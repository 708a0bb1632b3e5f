#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sepopt/dynamics.hpp"
#include "sepopt/rng.hpp"
#include "support/test_util.hpp"

using namespace sepopt;

TEST_CASE("wrap_angle maps into [-pi, pi)") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(-kPi).epsilon(1e-12));
    CHECK(wrap_angle(-kPi - 0.1) ==
          doctest::Approx(kPi - 0.1).epsilon(1e-12));
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(-kPi) == -kPi);

    RngStream rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.next_uniform(-50.0, 50.0);
        const double r = wrap_angle(a);
        CHECK(r >= -kPi);
        CHECK(r < kPi);
        // same direction modulo 2 pi
        CHECK(std::sin(r) == doctest::Approx(std::sin(a)).epsilon(1e-9));
        CHECK(std::cos(r) == doctest::Approx(std::cos(a)).epsilon(1e-9));
    }
}

TEST_CASE("straight flight moves exactly v*dt along the heading") {
    const VehicleState s{0.0, 0.0, 0.0};
    const VehicleState out = step_vehicle(s, 30.0, 0.0, 1.0);
    CHECK(out.x == doctest::Approx(30.0));
    CHECK(out.y == doctest::Approx(0.0));
    CHECK(out.psi == 0.0);

    RngStream rng(8);
    for (int i = 0; i < 200; ++i) {
        VehicleState v;
        v.x = rng.next_uniform(-1000.0, 1000.0);
        v.y = rng.next_uniform(-1000.0, 1000.0);
        v.psi = rng.next_uniform(-kPi, kPi);
        const double speed = rng.next_uniform(1.0, 80.0);
        const double dt = rng.next_uniform(0.1, 5.0);
        const VehicleState n = step_vehicle(v, speed, 0.0, dt);
        const double disp = std::hypot(n.x - v.x, n.y - v.y);
        CHECK(disp == doctest::Approx(speed * dt).epsilon(1e-12));
        CHECK(n.psi == v.psi);
    }
}

TEST_CASE("quarter-turn arc matches closed form and fine-step Euler") {
    const VehicleState s{0.0, 0.0, 0.0};
    const VehicleState out = step_vehicle(s, 30.0, kPi / 2.0, 1.0);
    CHECK(out.x == doctest::Approx(60.0 / kPi).epsilon(1e-12));
    CHECK(out.y == doctest::Approx(60.0 / kPi).epsilon(1e-12));
    CHECK(out.psi == doctest::Approx(kPi / 2.0));

    const VehicleState oracle =
        test::euler_step_oracle(s, 30.0, kPi / 2.0, 1.0, 1'000'000);
    CHECK(out.x == doctest::Approx(oracle.x).epsilon(0).scale(1).epsilon(1e-3));
    CHECK(std::abs(out.x - oracle.x) < 1e-3);
    CHECK(std::abs(out.y - oracle.y) < 1e-3);
}

TEST_CASE("full-circle turn returns to the starting point") {
    const VehicleState s{5.0, 7.0, 0.8};
    const double dt = 1.0;
    const VehicleState out = step_vehicle(s, 42.0, 2.0 * kPi / dt, dt);
    CHECK(out.x == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(out.y == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(out.psi == doctest::Approx(0.8));
}

TEST_CASE("turning displacement is the chord length, at most v*dt") {
    RngStream rng(9);
    for (int i = 0; i < 500; ++i) {
        VehicleState v;
        v.psi = rng.next_uniform(-kPi, kPi);
        const double speed = rng.next_uniform(5.0, 80.0);
        const double w = rng.next_uniform(-1.0, 1.0);
        const double dt = rng.next_uniform(0.2, 3.0);
        if (std::abs(w) < 1e-6) continue;
        const VehicleState n = step_vehicle(v, speed, w, dt);
        const double disp = std::hypot(n.x - v.x, n.y - v.y);
        const double chord =
            2.0 * (speed / std::abs(w)) * std::sin(std::abs(w) * dt / 2.0);
        CHECK(disp == doctest::Approx(chord).epsilon(1e-9));
        CHECK(disp <= speed * dt * (1.0 + 1e-12));
    }
}

TEST_CASE("stepping commutes with rotation about the origin") {
    RngStream rng(10);
    for (int i = 0; i < 300; ++i) {
        VehicleState v;
        v.x = rng.next_uniform(-500.0, 500.0);
        v.y = rng.next_uniform(-500.0, 500.0);
        v.psi = rng.next_uniform(-kPi, kPi);
        const double speed = rng.next_uniform(5.0, 80.0);
        const double w = rng.next_uniform(-0.5, 0.5);
        const double alpha = rng.next_uniform(-kPi, kPi);
        const double ca = std::cos(alpha), sa = std::sin(alpha);

        auto rotate = [&](const VehicleState& u) {
            VehicleState r;
            r.x = ca * u.x - sa * u.y;
            r.y = sa * u.x + ca * u.y;
            r.psi = wrap_angle(u.psi + alpha);
            return r;
        };

        const VehicleState step_then_rotate = rotate(step_vehicle(v, speed, w, 1.0));
        const VehicleState rotate_then_step = step_vehicle(rotate(v), speed, w, 1.0);
        CHECK(step_then_rotate.x ==
              doctest::Approx(rotate_then_step.x).epsilon(1e-9));
        CHECK(step_then_rotate.y ==
              doctest::Approx(rotate_then_step.y).epsilon(1e-9));
        CHECK(std::abs(wrap_angle(step_then_rotate.psi -
                                  rotate_then_step.psi)) < 1e-9);
    }
}

TEST_CASE("arc branch is continuous at the straight-flight threshold") {
    const VehicleState s{3.0, -2.0, 1.1};
    const VehicleState straight = step_vehicle(s, 30.0, 0.0, 1.0);
    for (const double eps : {1e-8, -1e-8}) {
        const VehicleState arc = step_vehicle(s, 30.0, eps, 1.0);
        CHECK(std::abs(arc.x - straight.x) < 1e-5);
        CHECK(std::abs(arc.y - straight.y) < 1e-5);
        CHECK(std::abs(wrap_angle(arc.psi - straight.psi)) < 1e-7);
    }
}

TEST_CASE("intruder step reduces to the vehicle update") {
    const VehicleParams params{60.0, 0.0};
    const VehicleState s{100.0, 50.0, 0.3};

    const VehicleState straight = step_intruder(s, params, 0.0, 1.0);
    CHECK(straight == step_vehicle(s, 60.0, 0.0, 1.0));

    // one-sigma turn: heading advances by 10 degrees over a second
    const double w = deg2rad(10.0);
    const VehicleState turned = step_intruder(s, params, w, 1.0);
    CHECK(wrap_angle(turned.psi - s.psi) == doctest::Approx(w));
    const double disp = std::hypot(turned.x - s.x, turned.y - s.y);
    CHECK(disp <= 60.0);
    const double chord = 2.0 * (60.0 / w) * std::sin(w / 2.0);
    CHECK(disp == doctest::Approx(chord).epsilon(1e-12));
}
