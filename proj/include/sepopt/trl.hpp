#pragma once

#include "sepopt/cpa.hpp"
#include "sepopt/dynamics.hpp"

namespace sepopt {

struct EncounterState;   // encounter.hpp
struct ScenarioConfig;   // encounter.hpp

// Candidate headings achieving the best possible separation are considered
// equal within this slack when the conflict is inescapable.
inline constexpr double kDstarSlack = 1e-6;  // m

// Goal-offset ties between candidate headings within this tolerance go to
// the lower candidate index.
inline constexpr double kGoalTieEps = 1e-9;  // rad

// Resolution-logic parameters: candidates are the current heading offset by
// multiples of pi/n_headings, giving 2*n_headings + 1 choices.
struct TrlConfig {
    int n_headings = 18;

    int candidate_count() const { return 2 * n_headings + 1; }
};

// Candidate heading for index n in [-N, N].
inline double candidate_heading(double own_psi, int n, int n_headings) {
    return own_psi + static_cast<double>(n) * (kPi / n_headings);
}

// Straight-line extrapolated separation tau seconds ahead, with the own
// vehicle flying candidate heading psi_cand and the intruder holding course.
double pairwise_distance(const EncounterState& s, const ScenarioConfig& cfg,
                         double psi_cand, double tau);

// Time of closest approach under straight-line extrapolation, clamped to 0
// for receding or parallel equal-velocity geometry.
double tau_min(const EncounterState& s, const ScenarioConfig& cfg,
               double psi_cand);

// Minimum separation over all future time for a candidate heading.
double d_min(const EncounterState& s, const ScenarioConfig& cfg,
             double psi_cand);

// Result of one resolution: the heading, which branch produced it, and how
// close to the goal bearing the candidate set could have come if the
// separation constraint were ignored (used by the deviation check).
struct TrlResolution {
    double heading = 0.0;      // rad, wrapped
    int candidate_index = 0;   // n in [-N, N]
    bool inescapable = false;  // no candidate achieved separation >= D
    double goal_offset = 0.0;            // |chosen - goal bearing|
    double best_attainable_offset = 0.0; // min over all candidates
};

double bearing_to_goal(const VehicleState& own, const ScenarioConfig& cfg);

// Trusted resolution logic: among the 2N+1 candidate headings, keep those
// whose minimum future separation is at least the desired separation D (or,
// if none reaches D, those achieving the best attainable separation) and
// return the one closest to the goal bearing.
TrlResolution trl_resolve_full(const EncounterState& s, double separation,
                               const ScenarioConfig& cfg);

double trl_resolve(const EncounterState& s, double separation,
                   const ScenarioConfig& cfg);

// Heading-tracking controller: full correction in one step when feasible,
// saturated at max_turn_rate otherwise.
double track_controller(const VehicleState& own, double psi_resolution,
                        const VehicleParams& params, double dt);

}  // namespace sepopt
