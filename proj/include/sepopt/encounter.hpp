#pragma once

#include <cstdint>

#include "sepopt/dynamics.hpp"
#include "sepopt/trl.hpp"

namespace sepopt {

// A commanded heading counts as a deviation when it differs from the direct
// course to the goal by more than this.
inline constexpr double kDeviationEps = 1e-6;  // rad

// Feature-architecture knobs: node counts and ranges for the two
// interpolation grids. The groups can be disabled individually, which is
// used by solver sanity tests (constant-feature-only problems).
struct FeatureConfig {
    bool intruder_group = true;
    int intruder_dist_nodes = 12;
    double intruder_dist_min = 0.0;     // m
    double intruder_dist_max = 1200.0;  // m
    int intruder_bearing_nodes = 12;    // periodic over [-pi, pi)
    int intruder_heading_nodes = 12;    // periodic over [-pi, pi)

    bool goal_group = true;
    int goal_dist_nodes = 9;
    double goal_dist_max = 1500.0;  // m
    int goal_bearing_nodes = 9;     // |bearing|, [0, pi]
};

// Axis-aligned region used for sampling own-vehicle positions and for the
// value/policy slice exports.
struct OperatingBox {
    double x_min = -200.0;
    double x_max = 1200.0;
    double y_min = -800.0;
    double y_max = 800.0;
};

// Intruder spawn region: annulus around a center point, heading pointed
// within a cone of the bearing to the center.
struct SpawnRegion {
    double center_x = 500.0;                    // m
    double center_y = 500.0;                    // m
    double radius_min = 800.0;                  // m
    double radius_max = 1500.0;                 // m
    double heading_half_width = deg2rad(135.0); // rad
};

// All physical and reward constants of the encounter model.
struct ScenarioConfig {
    double own_speed = 30.0;                   // m/s
    double intruder_speed = 60.0;              // m/s
    double max_turn_rate = deg2rad(18.7);      // rad/s
    double sigma_turn = deg2rad(10.0);         // rad/s, intruder noise std
    double d_nmac = 152.4;                     // m (500 ft)
    double d_goal = 100.0;                     // m
    double goal_x = 1000.0;                    // m
    double goal_y = 0.0;                       // m
    double dt = 1.0;                           // s
    int max_steps = 100;
    double c_step = 1.0;
    double r_goal = 100.0;
    double c_dev = 100.0;
    double lambda = 1000.0;
    TrlConfig trl;
    FeatureConfig features;
    OperatingBox box;
    SpawnRegion spawn;

    VehicleParams own_params() const { return {own_speed, max_turn_rate}; }
    VehicleParams intruder_params() const { return {intruder_speed, 0.0}; }

    // Throws ConfigError naming the violated invariant.
    void validate() const;
};

// Full MDP state. A state with `terminal` set is the absorbing endpoint of
// an episode: its components are frozen at the values they had when the
// goal/NMAC condition was met, it produces no reward, and transitions leave
// it unchanged.
struct EncounterState {
    VehicleState own;
    VehicleState intruder;
    bool dev = false;
    bool terminal = false;

    bool operator==(const EncounterState&) const = default;
};

// Own state advanced one step (deterministic given the action), intruder
// still at the current time. Lives in the same state space as
// EncounterState, so the feature function applies unchanged.
struct PostDecisionState {
    VehicleState own_next;
    VehicleState intruder_now;
    bool dev_next = false;
    bool terminal = false;

    bool operator==(const PostDecisionState&) const = default;
};

bool is_nmac(const EncounterState& s, const ScenarioConfig& cfg);
bool in_goal(const VehicleState& own, const ScenarioConfig& cfg);

// 1 iff the deviation latch is not yet set and applying the TRL with
// separation D at s forces a heading farther from the goal bearing than
// the candidate set could otherwise reach. On the nominal path (heading
// locked onto the goal) this is exactly "left the straight course".
int deviates(const EncounterState& s, double separation,
             const ScenarioConfig& cfg);

// Direct-control analogue: commanding a turn is the deviation.
int deviates_turn_rate(const EncounterState& s, double turn_rate,
                       const ScenarioConfig& cfg);

double reward(const EncounterState& s, double separation,
              const ScenarioConfig& cfg);
double reward_turn_rate(const EncounterState& s, double turn_rate,
                        const ScenarioConfig& cfg);

// Deterministic half of the transition: own vehicle stepped under the TRL
// resolution, intruder untouched, deviation latch updated. Absorbs (returns
// a terminal post-decision state with frozen components) when called on a
// state already inside the goal or NMAC region. Rejects terminal input.
PostDecisionState post_decision(const EncounterState& s, double separation,
                                const ScenarioConfig& cfg);

// Direct-control variant: own turn rate is the action (clamped), no TRL.
PostDecisionState post_decision_turn_rate(const EncounterState& s,
                                          double turn_rate,
                                          const ScenarioConfig& cfg);

// Stochastic half: intruder stepped with noise w.
EncounterState complete_post_decision(const PostDecisionState& q, double w,
                                      const ScenarioConfig& cfg);

// Full transition; exactly complete_post_decision(post_decision(s, D), w).
// Terminal states are returned unchanged.
EncounterState transition(const EncounterState& s, double separation, double w,
                          const ScenarioConfig& cfg);
EncounterState transition_turn_rate(const EncounterState& s, double turn_rate,
                                    double w, const ScenarioConfig& cfg);

// An action is either a TRL separation parameter or a direct turn rate.
struct Action {
    enum class Kind { separation, turn_rate };
    Kind kind = Kind::separation;
    double value = 0.0;
};

// Stage reward and post-decision state for one action, sharing a single
// resolution-logic evaluation. Equivalent to calling reward()/post_decision()
// separately.
struct ActionOutcome {
    double reward = 0.0;
    PostDecisionState q;
};

ActionOutcome apply_action(const EncounterState& s, const Action& a,
                           const ScenarioConfig& cfg);

double reward_action(const EncounterState& s, const Action& a,
                     const ScenarioConfig& cfg);
PostDecisionState post_decision_action(const EncounterState& s,
                                       const Action& a,
                                       const ScenarioConfig& cfg);
EncounterState transition_action(const EncounterState& s, const Action& a,
                                 double w, const ScenarioConfig& cfg);

}  // namespace sepopt
