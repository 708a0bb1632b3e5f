#include "sepopt/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sepopt/errors.hpp"
#include "sepopt/threading.hpp"

namespace sepopt {

namespace {

// Indices of `actions` in tie-break preference order.
std::vector<std::size_t> separation_preference(
    const std::vector<double>& actions) {
    std::vector<std::size_t> order(actions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return actions[a] < actions[b];
                     });
    return order;
}

std::vector<std::size_t> turn_rate_preference(
    const std::vector<double>& actions) {
    std::vector<std::size_t> order(actions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         const double ma = std::abs(actions[a]);
                         const double mb = std::abs(actions[b]);
                         if (ma != mb) return ma < mb;
                         return actions[a] < actions[b];
                     });
    return order;
}

// Walk the actions in preference order and keep the first one whose
// post-decision value beats the incumbent by more than the tie tolerance.
Action argmax_post_decision(const EncounterState& s,
                            const WeightVector& theta_q,
                            const std::vector<double>& actions,
                            Action::Kind kind,
                            const std::vector<std::size_t>& order,
                            const ScenarioConfig& cfg,
                            const FeatureLayout& layout) {
    double best_value = 0.0;
    double best_action = 0.0;
    bool first = true;
    for (const std::size_t i : order) {
        const Action a{kind, actions[i]};
        const double v = value(post_decision_action(s, a, cfg), theta_q,
                               layout, cfg);
        if (first || v > best_value + kActionTieEps) {
            best_value = v;
            best_action = actions[i];
            first = false;
        }
    }
    return Action{kind, best_action};
}

}  // namespace

Action act(const Policy& policy, const EncounterState& s,
           const ScenarioConfig& cfg, const FeatureLayout& layout) {
    if (s.terminal) {
        throw std::invalid_argument("act: state is terminal");
    }
    return std::visit(
        [&](const auto& p) -> Action {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StaticTrl>) {
                return Action{Action::Kind::separation, p.d_bar};
            } else if constexpr (std::is_same_v<T, OptimizedTrl>) {
                return argmax_post_decision(
                    s, p.theta_q, p.actions, Action::Kind::separation,
                    separation_preference(p.actions), cfg, layout);
            } else if constexpr (std::is_same_v<T, DirectTurn>) {
                return argmax_post_decision(
                    s, p.theta_q, p.actions, Action::Kind::turn_rate,
                    turn_rate_preference(p.actions), cfg, layout);
            } else {
                return Action{Action::Kind::turn_rate, 0.0};
            }
        },
        policy);
}

double scenario_noise(const Scenario& scenario, std::uint64_t t,
                      const ScenarioConfig& cfg) {
    RngStream rng(
        stream_key(scenario.noise_seed, StreamPurpose::episode_noise, t));
    return rng.next_normal(cfg.sigma_turn);
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::goal: return "goal";
        case Outcome::nmac: return "nmac";
        case Outcome::timeout: return "timeout";
    }
    return "unknown";
}

EpisodeRecord simulate_episode(const Policy& policy, const Scenario& scenario,
                               const ScenarioConfig& cfg,
                               const FeatureLayout& layout) {
    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};
    s.intruder = scenario.intruder_initial;

    EpisodeRecord rec;
    auto separation = [&] {
        const double dx = s.own.x - s.intruder.x;
        const double dy = s.own.y - s.intruder.y;
        return std::sqrt(dx * dx + dy * dy);
    };
    rec.min_separation = separation();

    for (int t = 0; t < cfg.max_steps; ++t) {
        const Action a = act(policy, s, cfg, layout);
        const ActionOutcome step = apply_action(s, a, cfg);
        rec.total_reward += step.reward;
        if (step.q.terminal) {
            s = complete_post_decision(step.q, 0.0, cfg);
            rec.steps = t;
            rec.outcome = is_nmac(s, cfg) ? Outcome::nmac : Outcome::goal;
            rec.deviated = s.dev;
            return rec;
        }
        const double w =
            scenario_noise(scenario, static_cast<std::uint64_t>(t), cfg);
        ++rec.noise_draws;
        s = complete_post_decision(step.q, w, cfg);
        rec.min_separation = std::min(rec.min_separation, separation());
    }
    rec.steps = cfg.max_steps;
    rec.outcome = Outcome::timeout;
    rec.deviated = s.dev;
    return rec;
}

Scenario sample_scenario(std::uint64_t seed, std::uint64_t index,
                         const ScenarioConfig& cfg) {
    RngStream rng(stream_key(seed, StreamPurpose::scenario, index));
    const double radius =
        rng.next_uniform(cfg.spawn.radius_min, cfg.spawn.radius_max);
    const double angle = rng.next_uniform(0.0, 2.0 * kPi);

    Scenario sc;
    sc.intruder_initial.x = cfg.spawn.center_x + radius * std::cos(angle);
    sc.intruder_initial.y = cfg.spawn.center_y + radius * std::sin(angle);
    const double bearing_to_center =
        std::atan2(cfg.spawn.center_y - sc.intruder_initial.y,
                   cfg.spawn.center_x - sc.intruder_initial.x);
    const double offset = rng.next_uniform(-cfg.spawn.heading_half_width,
                                           cfg.spawn.heading_half_width);
    sc.intruder_initial.psi = wrap_angle(bearing_to_center + offset);
    sc.noise_seed = stream_key(seed, StreamPurpose::episode_seed, index);
    return sc;
}

std::vector<Scenario> sample_scenarios(std::uint64_t seed, int n,
                                       const ScenarioConfig& cfg) {
    std::vector<Scenario> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sample_scenario(seed, i, cfg);
    }
    return out;
}

std::vector<Scenario> generate_nmac_filtered_set(int n, std::uint64_t seed,
                                                 const ScenarioConfig& cfg,
                                                 const FeatureLayout& layout,
                                                 int n_threads) {
    constexpr std::uint64_t kMaxAttempts = 10'000'000;
    const int threads = n_threads > 0 ? n_threads : default_thread_count();
    const Policy nominal = Nominal{};

    std::vector<Scenario> kept;
    kept.reserve(static_cast<std::size_t>(n));
    std::uint64_t attempted = 0;

    // Fixed-size batches keep the accepted order deterministic while the
    // nominal rollouts run in parallel.
    const std::size_t batch = 4096;
    std::vector<Scenario> scenarios(batch);
    std::vector<char> hit(batch);
    while (static_cast<int>(kept.size()) < n) {
        for (std::size_t i = 0; i < batch; ++i) {
            scenarios[i] = sample_scenario(seed, attempted + i, cfg);
        }
        parallel_for(batch, threads, [&](std::size_t i) {
            const EpisodeRecord rec =
                simulate_episode(nominal, scenarios[i], cfg, layout);
            hit[i] = rec.outcome == Outcome::nmac ? 1 : 0;
        });
        for (std::size_t i = 0;
             i < batch && static_cast<int>(kept.size()) < n; ++i) {
            if (hit[i]) kept.push_back(scenarios[i]);
        }
        attempted += batch;
        if (attempted >= kMaxAttempts &&
            static_cast<double>(kept.size()) <
                1e-3 * static_cast<double>(attempted) &&
            static_cast<int>(kept.size()) < n) {
            throw ConfigError(
                "filtered-set acceptance rate below 0.1% after " +
                std::to_string(attempted) + " attempts (" +
                std::to_string(kept.size()) +
                " kept); encounter geometry looks misconfigured");
        }
    }
    return kept;
}

EvalReport evaluate(const Policy& policy, const std::vector<Scenario>& set,
                    const ScenarioConfig& cfg, const FeatureLayout& layout,
                    int n_threads) {
    const int threads = n_threads > 0 ? n_threads : default_thread_count();
    std::vector<EpisodeRecord> records(set.size());
    parallel_for(set.size(), threads, [&](std::size_t i) {
        records[i] = simulate_episode(policy, set[i], cfg, layout);
    });

    EvalReport report;
    report.n_episodes = static_cast<int>(set.size());
    double reward_sum = 0.0;
    double step_sum = 0.0;
    for (const auto& rec : records) {
        report.n_deviations += rec.deviated ? 1 : 0;
        switch (rec.outcome) {
            case Outcome::goal: ++report.n_goals; break;
            case Outcome::nmac: ++report.n_nmacs; break;
            case Outcome::timeout: ++report.n_timeouts; break;
        }
        reward_sum += rec.total_reward;
        step_sum += rec.steps;
    }
    if (report.n_episodes > 0) {
        report.mean_total_reward = reward_sum / report.n_episodes;
        report.mean_steps = step_sum / report.n_episodes;
    }
    return report;
}

const char* family_name(ParetoFamily::Kind kind) {
    switch (kind) {
        case ParetoFamily::Kind::static_trl: return "static";
        case ParetoFamily::Kind::optimized_trl: return "optimized-trl";
        case ParetoFamily::Kind::direct: return "direct";
    }
    return "unknown";
}

std::vector<ParetoPoint> pareto_sweep(const ParetoFamily& family,
                                      const ScenarioConfig& cfg,
                                      const SolverConfig& solver_base,
                                      const std::vector<Scenario>& unfiltered,
                                      const std::vector<Scenario>& filtered,
                                      const FeatureLayout& layout,
                                      const IterationLog& log) {
    std::vector<ParetoPoint> points;
    points.reserve(family.params.size());

    for (const double param : family.params) {
        ParetoPoint point;
        point.param = param;
        try {
            ScenarioConfig run_cfg = cfg;
            Policy policy = Nominal{};
            if (family.kind == ParetoFamily::Kind::static_trl) {
                policy = StaticTrl{param};
            } else {
                run_cfg.lambda = param;
                SolverConfig solver = solver_base;
                solver.action_kind =
                    family.kind == ParetoFamily::Kind::direct
                        ? Action::Kind::turn_rate
                        : Action::Kind::separation;
                solver.actions = solver.action_kind == Action::Kind::turn_rate
                                     ? default_turn_rate_actions(run_cfg)
                                     : default_separation_actions(run_cfg);
                const WeightVector theta =
                    projected_value_iteration(run_cfg, solver, layout, log);
                const WeightVector theta_q = extract_post_decision_weights(
                    theta, run_cfg, solver, layout);
                if (family.kind == ParetoFamily::Kind::direct) {
                    policy = DirectTurn{theta_q, solver.actions};
                } else {
                    policy = OptimizedTrl{theta_q, solver.actions};
                }
            }
            point.unfiltered = evaluate(policy, unfiltered, run_cfg, layout,
                                        solver_base.n_threads);
            point.filtered = evaluate(policy, filtered, run_cfg, layout,
                                      solver_base.n_threads);
            point.deviations = point.unfiltered.n_deviations;
            point.risk_ratio = point.filtered.nmac_fraction();
            point.solved = true;
        } catch (const std::exception& e) {
            point.solved = false;
            point.error = e.what();
        }
        points.push_back(std::move(point));
    }
    return points;
}

}  // namespace sepopt
