#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sepopt/encounter.hpp"
#include "sepopt/features.hpp"
#include "sepopt/rng.hpp"
#include "sepopt/solver.hpp"

namespace sepopt {

// Post-decision values within this tolerance are treated as tied; ties go
// to the least conservative action.
inline constexpr double kActionTieEps = 1e-9;

// Constant separation parameter.
struct StaticTrl {
    double d_bar = 0.0;  // m
};

// Argmax of the post-decision value over the separation action set.
struct OptimizedTrl {
    WeightVector theta_q;
    std::vector<double> actions;  // separations, m
};

// Argmax of the post-decision value over the turn-rate action set.
struct DirectTurn {
    WeightVector theta_q;
    std::vector<double> actions;  // rad/s
};

// Never turns; used for risk-ratio denominators and scenario filtering.
struct Nominal {};

using Policy = std::variant<StaticTrl, OptimizedTrl, DirectTurn, Nominal>;

// Stationary policy evaluation at a non-terminal state. Ties in the
// post-decision value go to the smallest separation (OptimizedTrl) or the
// smallest-magnitude rate with the negative one first (DirectTurn).
Action act(const Policy& policy, const EncounterState& s,
           const ScenarioConfig& cfg, const FeatureLayout& layout);

// An episode's replayable inputs: the intruder's initial state plus the
// key of its per-step noise stream. Replaying a scenario against any
// policy consumes the identical noise sequence index-for-index.
struct Scenario {
    VehicleState intruder_initial;
    std::uint64_t noise_seed = 0;
};

// Intruder turn-rate noise for step t of a scenario.
double scenario_noise(const Scenario& scenario, std::uint64_t t,
                      const ScenarioConfig& cfg);

enum class Outcome { goal, nmac, timeout };

const char* outcome_name(Outcome o);

struct EpisodeRecord {
    double total_reward = 0.0;
    int steps = 0;  // movement transitions before absorption or cap
    Outcome outcome = Outcome::timeout;
    bool deviated = false;
    double min_separation = 0.0;
    std::uint64_t noise_draws = 0;  // normal deviates consumed
};

// Roll the policy from the standard initial condition (own at the origin
// pointed at the goal) until absorption or the step cap.
EpisodeRecord simulate_episode(const Policy& policy, const Scenario& scenario,
                               const ScenarioConfig& cfg,
                               const FeatureLayout& layout);

// Intruder spawn: uniform radius and angle in the spawn annulus, heading
// within the configured cone of the bearing to the area center.
Scenario sample_scenario(std::uint64_t seed, std::uint64_t index,
                         const ScenarioConfig& cfg);
std::vector<Scenario> sample_scenarios(std::uint64_t seed, int n,
                                       const ScenarioConfig& cfg);

// Rejection-sample scenarios that end in an NMAC under the Nominal policy.
// Throws when the acceptance rate over ten million attempts falls below
// 0.1%, which signals a misconfigured encounter geometry.
std::vector<Scenario> generate_nmac_filtered_set(int n, std::uint64_t seed,
                                                 const ScenarioConfig& cfg,
                                                 const FeatureLayout& layout,
                                                 int n_threads = 0);

struct EvalReport {
    int n_episodes = 0;
    int n_deviations = 0;
    int n_nmacs = 0;
    int n_goals = 0;
    int n_timeouts = 0;
    double mean_total_reward = 0.0;
    double mean_steps = 0.0;

    double nmac_fraction() const {
        return n_episodes == 0
                   ? 0.0
                   : static_cast<double>(n_nmacs) / n_episodes;
    }
};

EvalReport evaluate(const Policy& policy, const std::vector<Scenario>& set,
                    const ScenarioConfig& cfg, const FeatureLayout& layout,
                    int n_threads = 0);

struct ParetoFamily {
    enum class Kind { static_trl, optimized_trl, direct };
    Kind kind = Kind::static_trl;
    std::vector<double> params;  // d_bar values (m) or lambda values
};

const char* family_name(ParetoFamily::Kind kind);

struct ParetoPoint {
    double param = 0.0;       // d_bar or lambda
    bool solved = false;
    std::string error;        // set when the solver failed for this point
    int deviations = 0;       // on the unfiltered set
    double risk_ratio = 0.0;  // NMAC fraction on the filtered set
    EvalReport unfiltered;
    EvalReport filtered;
};

// One point per parameter value, all points sharing the two scenario sets.
// Optimized families run the full train/extract pipeline per parameter;
// solver failures are recorded on the point without aborting the sweep.
std::vector<ParetoPoint> pareto_sweep(const ParetoFamily& family,
                                      const ScenarioConfig& cfg,
                                      const SolverConfig& solver_base,
                                      const std::vector<Scenario>& unfiltered,
                                      const std::vector<Scenario>& filtered,
                                      const FeatureLayout& layout,
                                      const IterationLog& log = {});

}  // namespace sepopt
