#include "sepopt/encounter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sepopt/errors.hpp"

namespace sepopt {

namespace {

double separation_sq(const EncounterState& s) {
    const double dx = s.own.x - s.intruder.x;
    const double dy = s.own.y - s.intruder.y;
    return dx * dx + dy * dy;
}

double goal_dist_sq(const VehicleState& own, const ScenarioConfig& cfg) {
    const double dx = own.x - cfg.goal_x;
    const double dy = own.y - cfg.goal_y;
    return dx * dx + dy * dy;
}

// Commanded update for an action, with the departure-from-nominal verdict.
// A TRL action deviates when the separation constraint forces a heading
// farther from the goal bearing than the candidate set could otherwise
// reach; a direct action deviates when it commands a turn. On the nominal
// path (heading locked onto the goal) both reduce to "left the straight
// course to the goal".
struct OwnCommand {
    double turn_rate = 0.0;
    bool off_nominal = false;
};

OwnCommand own_command(const EncounterState& s, const Action& a,
                       const ScenarioConfig& cfg) {
    OwnCommand cmd;
    if (a.kind == Action::Kind::separation) {
        const TrlResolution res = trl_resolve_full(s, a.value, cfg);
        cmd.turn_rate =
            track_controller(s.own, res.heading, cfg.own_params(), cfg.dt);
        cmd.off_nominal =
            res.goal_offset > res.best_attainable_offset + kDeviationEps;
    } else {
        cmd.turn_rate =
            std::clamp(a.value, -cfg.max_turn_rate, cfg.max_turn_rate);
        cmd.off_nominal = std::abs(cmd.turn_rate) > kTurnRateEps;
    }
    return cmd;
}

int deviates_command(const EncounterState& s, const OwnCommand& cmd) {
    if (s.dev || s.terminal) return 0;
    return cmd.off_nominal ? 1 : 0;
}

ActionOutcome apply_command(const EncounterState& s, const OwnCommand& cmd,
                            const ScenarioConfig& cfg) {
    if (s.terminal) {
        throw std::invalid_argument("post_decision: state is terminal");
    }
    const int dev_now = deviates_command(s, cmd);

    ActionOutcome out;
    out.reward = -cfg.c_step +
                 cfg.r_goal * (in_goal(s.own, cfg) ? 1.0 : 0.0) -
                 cfg.c_dev * dev_now -
                 cfg.lambda * (is_nmac(s, cfg) ? 1.0 : 0.0);

    if (in_goal(s.own, cfg) || is_nmac(s, cfg)) {
        // Episode ends here: freeze the components and absorb.
        out.q.own_next = s.own;
        out.q.intruder_now = s.intruder;
        out.q.dev_next = s.dev;
        out.q.terminal = true;
        return out;
    }

    out.q.own_next = step_vehicle(s.own, cfg.own_speed, cmd.turn_rate, cfg.dt);
    out.q.intruder_now = s.intruder;
    out.q.dev_next = s.dev || dev_now != 0;
    out.q.terminal = false;
    return out;
}

}  // namespace

void ScenarioConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw ConfigError(std::string(name) + " must be > 0");
        }
    };
    positive(own_speed, "own_speed");
    positive(intruder_speed, "intruder_speed");
    positive(max_turn_rate, "max_turn_rate");
    positive(d_nmac, "d_nmac");
    positive(d_goal, "d_goal");
    positive(dt, "dt");
    if (sigma_turn < 0.0) throw ConfigError("sigma_turn must be >= 0");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (trl.n_headings < 1) throw ConfigError("trl.n_headings must be >= 1");
    if (features.intruder_group) {
        if (features.intruder_dist_nodes < 2 ||
            features.intruder_bearing_nodes < 2 ||
            features.intruder_heading_nodes < 2) {
            throw ConfigError("intruder grid axes need >= 2 nodes");
        }
        if (!(features.intruder_dist_max > features.intruder_dist_min)) {
            throw ConfigError(
                "intruder_dist_max must exceed intruder_dist_min");
        }
    }
    if (features.goal_group) {
        if (features.goal_dist_nodes < 2 || features.goal_bearing_nodes < 2) {
            throw ConfigError("goal grid axes need >= 2 nodes");
        }
        positive(features.goal_dist_max, "goal_dist_max");
    }
    if (!(box.x_max > box.x_min) || !(box.y_max > box.y_min)) {
        throw ConfigError("operating box must have positive extent");
    }
    if (!(spawn.radius_max >= spawn.radius_min) || spawn.radius_min <= 0.0) {
        throw ConfigError("spawn radii must satisfy 0 < r_min <= r_max");
    }
}

bool is_nmac(const EncounterState& s, const ScenarioConfig& cfg) {
    return separation_sq(s) <= cfg.d_nmac * cfg.d_nmac;
}

bool in_goal(const VehicleState& own, const ScenarioConfig& cfg) {
    return goal_dist_sq(own, cfg) <= cfg.d_goal * cfg.d_goal;
}

int deviates(const EncounterState& s, double separation,
             const ScenarioConfig& cfg) {
    if (s.dev || s.terminal) return 0;
    return deviates_command(
        s, own_command(s, {Action::Kind::separation, separation}, cfg));
}

int deviates_turn_rate(const EncounterState& s, double turn_rate,
                       const ScenarioConfig& cfg) {
    if (s.dev || s.terminal) return 0;
    return deviates_command(
        s, own_command(s, {Action::Kind::turn_rate, turn_rate}, cfg));
}

ActionOutcome apply_action(const EncounterState& s, const Action& a,
                           const ScenarioConfig& cfg) {
    return apply_command(s, own_command(s, a, cfg), cfg);
}

double reward_action(const EncounterState& s, const Action& a,
                     const ScenarioConfig& cfg) {
    if (s.terminal) return 0.0;
    return apply_action(s, a, cfg).reward;
}

double reward(const EncounterState& s, double separation,
              const ScenarioConfig& cfg) {
    return reward_action(s, {Action::Kind::separation, separation}, cfg);
}

double reward_turn_rate(const EncounterState& s, double turn_rate,
                        const ScenarioConfig& cfg) {
    return reward_action(s, {Action::Kind::turn_rate, turn_rate}, cfg);
}

PostDecisionState post_decision(const EncounterState& s, double separation,
                                const ScenarioConfig& cfg) {
    return apply_action(s, {Action::Kind::separation, separation}, cfg).q;
}

PostDecisionState post_decision_turn_rate(const EncounterState& s,
                                          double turn_rate,
                                          const ScenarioConfig& cfg) {
    return apply_action(s, {Action::Kind::turn_rate, turn_rate}, cfg).q;
}

PostDecisionState post_decision_action(const EncounterState& s,
                                       const Action& a,
                                       const ScenarioConfig& cfg) {
    return apply_action(s, a, cfg).q;
}

EncounterState complete_post_decision(const PostDecisionState& q, double w,
                                      const ScenarioConfig& cfg) {
    EncounterState s;
    if (q.terminal) {
        s.own = q.own_next;
        s.intruder = q.intruder_now;
        s.dev = q.dev_next;
        s.terminal = true;
        return s;
    }
    s.own = q.own_next;
    s.intruder = step_intruder(q.intruder_now, cfg.intruder_params(), w, cfg.dt);
    s.dev = q.dev_next;
    s.terminal = false;
    return s;
}

EncounterState transition_action(const EncounterState& s, const Action& a,
                                 double w, const ScenarioConfig& cfg) {
    if (s.terminal) return s;
    return complete_post_decision(post_decision_action(s, a, cfg), w, cfg);
}

EncounterState transition(const EncounterState& s, double separation, double w,
                          const ScenarioConfig& cfg) {
    return transition_action(s, {Action::Kind::separation, separation}, w, cfg);
}

EncounterState transition_turn_rate(const EncounterState& s, double turn_rate,
                                    double w, const ScenarioConfig& cfg) {
    return transition_action(s, {Action::Kind::turn_rate, turn_rate}, w, cfg);
}

}  // namespace sepopt
