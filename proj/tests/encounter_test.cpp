#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sepopt/encounter.hpp"
#include "sepopt/errors.hpp"
#include "sepopt/rng.hpp"
#include "support/test_util.hpp"

using namespace sepopt;

namespace {

// Hand-composed transition, mirroring the documented semantics: states in
// the goal/NMAC region absorb with frozen components; otherwise both
// vehicles step and the deviation latch updates.
EncounterState manual_transition(const EncounterState& s, double separation,
                                 double w, const ScenarioConfig& cfg) {
    if (s.terminal) return s;
    if (in_goal(s.own, cfg) || is_nmac(s, cfg)) {
        EncounterState frozen = s;
        frozen.terminal = true;
        return frozen;
    }
    EncounterState out;
    const double psi_res = trl_resolve(s, separation, cfg);
    const double rate =
        track_controller(s.own, psi_res, cfg.own_params(), cfg.dt);
    out.own = step_vehicle(s.own, cfg.own_speed, rate, cfg.dt);
    out.intruder = step_intruder(s.intruder, cfg.intruder_params(), w, cfg.dt);
    out.dev = s.dev || deviates(s, separation, cfg) != 0;
    out.terminal = false;
    return out;
}

}  // namespace

TEST_CASE("NMAC boundary is inclusive") {
    const ScenarioConfig cfg;
    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};

    s.intruder = VehicleState{cfg.d_nmac, 0.0, 0.0};  // exactly 500 ft
    CHECK(is_nmac(s, cfg));
    s.intruder = VehicleState{153.0, 0.0, 0.0};
    CHECK(!is_nmac(s, cfg));
    s.intruder = VehicleState{0.0, 0.0, 0.0};
    CHECK(is_nmac(s, cfg));
}

TEST_CASE("goal region boundary is inclusive") {
    const ScenarioConfig cfg;
    CHECK(in_goal(VehicleState{cfg.goal_x, cfg.goal_y, 0.0}, cfg));
    CHECK(in_goal(VehicleState{cfg.goal_x - cfg.d_goal, 0.0, 0.0}, cfg));
    CHECK(!in_goal(VehicleState{cfg.goal_x - cfg.d_goal - 1.0, 0.0, 0.0}, cfg));
}

TEST_CASE("deviation fires once and only off the nominal course") {
    const ScenarioConfig cfg;

    EncounterState clear;
    clear.own = VehicleState{0.0, 0.0, 0.0};
    clear.intruder = VehicleState{10000.0, 9000.0, 1.0};
    CHECK(deviates(clear, 300.0, cfg) == 0);

    // head-on conflict close enough that the TRL must leave the course
    EncounterState conflict;
    conflict.own = VehicleState{0.0, 0.0, 0.0};
    conflict.intruder = VehicleState{600.0, 0.0, wrap_angle(kPi)};
    const double res = trl_resolve(conflict, 300.0, cfg);
    const double offset =
        std::abs(wrap_angle(res - bearing_to_goal(conflict.own, cfg)));
    CHECK(offset > kDeviationEps);
    CHECK(deviates(conflict, 300.0, cfg) == 1);

    EncounterState latched = conflict;
    latched.dev = true;
    CHECK(deviates(latched, 300.0, cfg) == 0);
}

TEST_CASE("stage rewards match the weight table") {
    ScenarioConfig cfg;
    cfg.lambda = 1000.0;

    // cruise step: no events
    EncounterState cruise;
    cruise.own = VehicleState{0.0, 0.0, 0.0};
    cruise.intruder = VehicleState{10000.0, 9000.0, 1.0};
    CHECK(reward(cruise, 300.0, cfg) == doctest::Approx(-1.0));

    // goal-entry step, no deviation
    EncounterState at_goal = cruise;
    at_goal.own = VehicleState{cfg.goal_x - 50.0, cfg.goal_y, 0.0};
    CHECK(reward(at_goal, 152.4, cfg) == doctest::Approx(99.0));

    // deviation and NMAC in the same step
    EncounterState collide;
    collide.own = VehicleState{0.0, 0.0, 0.0};
    collide.intruder = VehicleState{100.0, 0.0, wrap_angle(kPi)};
    REQUIRE(is_nmac(collide, cfg));
    REQUIRE(deviates(collide, 300.0, cfg) == 1);
    CHECK(reward(collide, 300.0, cfg) == doctest::Approx(-1101.0));

    // terminal states produce nothing
    EncounterState done = collide;
    done.terminal = true;
    CHECK(reward(done, 300.0, cfg) == 0.0);
}

TEST_CASE("terminal states are absorbing") {
    const ScenarioConfig cfg;
    RngStream rng(31);
    for (int i = 0; i < 50; ++i) {
        EncounterState s = test::random_state(rng, cfg);
        s.terminal = true;
        const EncounterState next = transition(s, 300.0, 0.4, cfg);
        CHECK(next == s);
        CHECK(reward(next, 300.0, cfg) == 0.0);
    }
}

TEST_CASE("a clear path to the goal is flown straight") {
    const ScenarioConfig cfg;
    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};
    s.intruder = VehicleState{10000.0, 9000.0, 1.0};
    const EncounterState next = transition(s, cfg.d_nmac, 0.1, cfg);
    CHECK(next.own.x == doctest::Approx(30.0));
    CHECK(next.own.y == doctest::Approx(0.0));
    CHECK(next.own.psi == 0.0);
    CHECK(!next.dev);
}

TEST_CASE("transition equals the hand-composed update") {
    const ScenarioConfig cfg;
    RngStream rng(32);
    for (int i = 0; i < 2000; ++i) {
        const EncounterState s = test::random_state(rng, cfg, 50.0, 2500.0);
        const double separation = rng.next_uniform(100.0, 700.0);
        const double w = rng.next_normal(cfg.sigma_turn);
        const EncounterState via_module = transition(s, separation, w, cfg);
        const EncounterState via_parts = manual_transition(s, separation, w, cfg);
        CHECK(via_module == via_parts);
    }
}

TEST_CASE("post-decision state leaves the intruder untouched") {
    const ScenarioConfig cfg;
    RngStream rng(33);
    for (int i = 0; i < 500; ++i) {
        const EncounterState s = test::random_state(rng, cfg, 200.0, 2500.0);
        const double separation = rng.next_uniform(100.0, 700.0);
        const PostDecisionState q = post_decision(s, separation, cfg);
        CHECK(q.intruder_now == s.intruder);
        if (s.dev) CHECK(q.dev_next);

        // own component matches the full transition for any noise
        const EncounterState next =
            transition(s, separation, rng.next_normal(cfg.sigma_turn), cfg);
        CHECK(q.own_next == next.own);
    }

    EncounterState terminal;
    terminal.terminal = true;
    CHECK_THROWS_AS(post_decision(terminal, 300.0, cfg),
                    std::invalid_argument);
}

TEST_CASE("completing the post-decision state reproduces the transition") {
    const ScenarioConfig cfg;
    RngStream rng(34);
    for (int i = 0; i < 10000; ++i) {
        const EncounterState s = test::random_state(rng, cfg, 50.0, 2500.0);
        const double separation = rng.next_uniform(100.0, 700.0);
        const double w = rng.next_normal(cfg.sigma_turn);
        const EncounterState composed =
            complete_post_decision(post_decision(s, separation, cfg), w, cfg);
        const EncounterState direct = transition(s, separation, w, cfg);
        CHECK(composed == direct);
    }
}

TEST_CASE("zero noise completes with a straight intruder") {
    const ScenarioConfig cfg;
    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};
    s.intruder = VehicleState{800.0, 300.0, wrap_angle(2.0)};
    const PostDecisionState q = post_decision(s, 300.0, cfg);
    const EncounterState next = complete_post_decision(q, 0.0, cfg);
    const VehicleState straight =
        step_vehicle(s.intruder, cfg.intruder_speed, 0.0, cfg.dt);
    CHECK(next.intruder == straight);
}

TEST_CASE("a completion into the NMAC disc ends the episode next step") {
    const ScenarioConfig cfg;
    // own stepping straight toward an intruder closing head on
    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};
    s.intruder = VehicleState{230.0, 0.0, wrap_angle(kPi)};
    const PostDecisionState q = post_decision(s, cfg.d_nmac, cfg);
    const EncounterState inside = complete_post_decision(q, 0.0, cfg);
    REQUIRE(is_nmac(inside, cfg));
    // the NMAC state itself is the last rewarded state and then absorbs
    CHECK(!inside.terminal);
    CHECK(reward(inside, cfg.d_nmac, cfg) <= -1.0 - cfg.lambda + 1e-12);
    const EncounterState absorbed = transition(inside, cfg.d_nmac, 0.0, cfg);
    CHECK(absorbed.terminal);
    CHECK(reward(absorbed, cfg.d_nmac, cfg) == 0.0);
    CHECK(transition(absorbed, cfg.d_nmac, 0.3, cfg) == absorbed);
}

TEST_CASE("episode reward stays within the designed bounds") {
    ScenarioConfig cfg;
    cfg.lambda = 1000.0;
    RngStream rng(35);
    for (int ep = 0; ep < 200; ++ep) {
        EncounterState s;
        s.own = VehicleState{0.0, 0.0, 0.0};
        const double r = rng.next_uniform(800.0, 1500.0);
        const double a = rng.next_uniform(0.0, 2.0 * kPi);
        s.intruder.x = 500.0 + r * std::cos(a);
        s.intruder.y = 500.0 + r * std::sin(a);
        s.intruder.psi = rng.next_uniform(-kPi, kPi);

        double total = 0.0;
        int deviation_charges = 0;
        for (int t = 0; t < cfg.max_steps; ++t) {
            const double separation = rng.next_uniform(150.0, 650.0);
            deviation_charges += s.terminal ? 0 : deviates(s, separation, cfg);
            total += reward(s, separation, cfg);
            s = transition(s, separation, rng.next_normal(cfg.sigma_turn), cfg);
            if (s.terminal) break;
        }
        CHECK(total >=
              -(cfg.max_steps * cfg.c_step + cfg.c_dev + cfg.lambda) - 1e-9);
        CHECK(total <= cfg.r_goal - cfg.c_step + 1e-9);
        CHECK(deviation_charges <= 1);
    }
}
