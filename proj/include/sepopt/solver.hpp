#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sepopt/encounter.hpp"
#include "sepopt/features.hpp"
#include "sepopt/rng.hpp"

namespace sepopt {

// Offline solver parameters. Action values are TRL separations (meters) or
// direct turn rates (rad/s) depending on action_kind.
struct SolverConfig {
    int n_state = 10000;   // backup samples per iteration
    int n_ev = 20;         // single-step noise draws per expectation
    int n_vi = 35;         // value-iteration rounds
    int n_q = 50000;       // post-decision fit samples
    double ridge = 1e-6;   // least-squares regularization
    double gamma = 1.0;    // discount on the next-state value
    Action::Kind action_kind = Action::Kind::separation;
    std::vector<double> actions;  // meters or rad/s
    std::uint64_t seed = 1;
    int n_threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

// Default action sets: separations {1, 1.5, 2, 3, 4} x d_nmac, turn rates
// {-1, -1/2, 0, 1/2, 1} x max_turn_rate.
std::vector<double> default_separation_actions(const ScenarioConfig& cfg);
std::vector<double> default_turn_rate_actions(const ScenarioConfig& cfg);

// Per-iteration diagnostics emitted by projected_value_iteration.
struct IterationStats {
    int iteration = 0;
    double fit_rms_residual = 0.0;
    double theta_norm = 0.0;
    double max_abs_target = 0.0;
};
using IterationLog = std::function<void(const IterationStats&)>;

// Uniformly sampled non-terminal training states: own pose uniform over the
// operating box, deviation latch uniform, intruder placed on a uniformly
// chosen intruder-grid node. Keyed by (seed, iteration, index), so results
// are independent of thread count and call order.
EncounterState sample_training_state(const ScenarioConfig& cfg,
                                     const FeatureLayout& layout,
                                     std::uint64_t seed, std::uint64_t iteration,
                                     std::uint64_t index);
std::vector<EncounterState> sample_training_states(
    const ScenarioConfig& cfg, const FeatureLayout& layout,
    const SolverConfig& solver, std::uint64_t iteration);

// One-step Bellman backup at s: max over the action set of stage reward
// plus the mean next-state value over the given noise draws. The same
// draws are reused for every action.
double backup_sample(const EncounterState& s, const WeightVector& theta_k,
                     const ScenarioConfig& cfg, const SolverConfig& solver,
                     const FeatureLayout& layout,
                     std::span<const double> noise);

// Ridge least squares over sparse feature rows: minimizes the squared
// residual sum plus ridge * |theta|^2 via the normal equations. Throws
// NumericError when the system is singular (advises ridge > 0 when it is 0).
WeightVector fit_least_squares(const std::vector<SparseFeatures>& rows,
                               const std::vector<double>& targets,
                               double ridge, std::size_t n_beta);

// Projected value iteration: theta_0 = 0, then n_vi rounds of sampled
// backups followed by a least-squares projection onto the feature span.
WeightVector projected_value_iteration(const ScenarioConfig& cfg,
                                       const SolverConfig& solver,
                                       const FeatureLayout& layout,
                                       const IterationLog& log = {});

// Monte Carlo estimate of the post-decision value at q: the mean of
// value(complete_post_decision(q, w)) over the given noise draws.
double estimate_post_decision_value(const PostDecisionState& q,
                                    const WeightVector& theta,
                                    const ScenarioConfig& cfg,
                                    const FeatureLayout& layout,
                                    std::span<const double> noise);

// Fit of the post-decision value function: v_q(q) = E[value(h(q, w))] is
// estimated with n_ev draws at n_q sampled post-decision states and
// projected onto the feature span.
WeightVector extract_post_decision_weights(const WeightVector& theta,
                                           const ScenarioConfig& cfg,
                                           const SolverConfig& solver,
                                           const FeatureLayout& layout);

}  // namespace sepopt
