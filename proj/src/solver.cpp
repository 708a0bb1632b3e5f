#include "sepopt/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "sepopt/errors.hpp"
#include "sepopt/threading.hpp"

namespace sepopt {

void SolverConfig::validate() const {
    if (n_state < 1) throw ConfigError("n_state must be >= 1");
    if (n_ev < 1) throw ConfigError("n_ev must be >= 1");
    if (n_vi < 1) throw ConfigError("n_vi must be >= 1");
    if (n_q < 1) throw ConfigError("n_q must be >= 1");
    if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw ConfigError("gamma must be in (0, 1]");
    }
    if (actions.empty()) throw ConfigError("action set must be nonempty");
}

std::vector<double> default_separation_actions(const ScenarioConfig& cfg) {
    return {cfg.d_nmac, 1.5 * cfg.d_nmac, 2.0 * cfg.d_nmac, 3.0 * cfg.d_nmac,
            4.0 * cfg.d_nmac};
}

std::vector<double> default_turn_rate_actions(const ScenarioConfig& cfg) {
    return {-cfg.max_turn_rate, -cfg.max_turn_rate / 2.0, 0.0,
            cfg.max_turn_rate / 2.0, cfg.max_turn_rate};
}

namespace {

EncounterState sample_state_from_stream(const ScenarioConfig& cfg,
                                        const FeatureLayout& layout,
                                        RngStream& rng) {
    EncounterState s;
    s.own.x = rng.next_uniform(cfg.box.x_min, cfg.box.x_max);
    s.own.y = rng.next_uniform(cfg.box.y_min, cfg.box.y_max);
    s.own.psi = rng.next_uniform(-kPi, kPi);
    s.dev = rng.next_bool();
    s.terminal = false;

    if (layout.intruder_enabled) {
        // Uniform grid node, realized as an absolute intruder state; the
        // sample is on-grid by construction (equivalent to sample-then-snap).
        double coords[3];
        const auto& grid = layout.intruder_grid;
        const auto node =
            static_cast<std::uint32_t>(rng.next_index(grid.node_count()));
        grid.node_coords(node, coords);
        s.intruder = intruder_from_rel(
            s.own, IntruderRelState{coords[0], coords[1], coords[2]});
    } else {
        s.intruder.x = rng.next_uniform(cfg.box.x_min, cfg.box.x_max);
        s.intruder.y = rng.next_uniform(cfg.box.y_min, cfg.box.y_max);
        s.intruder.psi = rng.next_uniform(-kPi, kPi);
    }
    return s;
}

}  // namespace

EncounterState sample_training_state(const ScenarioConfig& cfg,
                                     const FeatureLayout& layout,
                                     std::uint64_t seed,
                                     std::uint64_t iteration,
                                     std::uint64_t index) {
    RngStream rng(
        stream_key(seed, StreamPurpose::train_states, iteration, index));
    return sample_state_from_stream(cfg, layout, rng);
}

std::vector<EncounterState> sample_training_states(const ScenarioConfig& cfg,
                                                   const FeatureLayout& layout,
                                                   const SolverConfig& solver,
                                                   std::uint64_t iteration) {
    std::vector<EncounterState> out(static_cast<std::size_t>(solver.n_state));
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = sample_training_state(cfg, layout, solver.seed, iteration, n);
    }
    return out;
}

double backup_sample(const EncounterState& s, const WeightVector& theta_k,
                     const ScenarioConfig& cfg, const SolverConfig& solver,
                     const FeatureLayout& layout,
                     std::span<const double> noise) {
    double best = 0.0;
    bool first = true;
    for (const double a : solver.actions) {
        const ActionOutcome outcome =
            apply_action(s, Action{solver.action_kind, a}, cfg);
        double acc = 0.0;
        for (const double w : noise) {
            const EncounterState next =
                complete_post_decision(outcome.q, w, cfg);
            acc += beta(next, layout, cfg).dot(theta_k);
        }
        const double v =
            outcome.reward +
            solver.gamma * acc / static_cast<double>(noise.size());
        if (first || v > best) {
            best = v;
            first = false;
        }
    }
    return best;
}

WeightVector fit_least_squares(const std::vector<SparseFeatures>& rows,
                               const std::vector<double>& targets,
                               double ridge, std::size_t n_beta) {
    const auto n = static_cast<Eigen::Index>(n_beta);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    // Normal equations accumulated in row order (upper triangle only);
    // the accumulation order is fixed regardless of how the rows were
    // produced, which keeps fits bit-reproducible across thread counts.
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const SparseFeatures& f = rows[r];
        const double t = targets[r];
        for (int i = 0; i < f.count; ++i) {
            const auto& ei = f.entries[static_cast<std::size_t>(i)];
            rhs[ei.index] += ei.value * t;
            for (int j = i; j < f.count; ++j) {
                const auto& ej = f.entries[static_cast<std::size_t>(j)];
                const auto a = std::min(ei.index, ej.index);
                const auto b = std::max(ei.index, ej.index);
                gram(a, b) += ei.value * ej.value;
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) gram(i, i) += ridge;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.selfadjointView<Eigen::Upper>());
    if (ldlt.info() != Eigen::Success) {
        throw NumericError(
            ridge == 0.0
                ? "least-squares system is singular; set ridge > 0"
                : "least-squares factorization failed despite ridge "
                  "regularization (degenerate sampling?)");
    }
    // LDLT quietly pseudo-solves rank-deficient systems; without ridge a
    // near-zero pivot means some feature was never observed.
    if (ridge == 0.0) {
        const Eigen::VectorXd& pivots = ldlt.vectorD();
        const double pivot_max = pivots.cwiseAbs().maxCoeff();
        if (pivot_max <= 0.0 || pivots.minCoeff() < 1e-14 * pivot_max) {
            throw NumericError(
                "least-squares system is singular; set ridge > 0");
        }
    }
    Eigen::VectorXd theta = ldlt.solve(rhs);
    if (!theta.allFinite()) {
        throw NumericError(
            ridge == 0.0
                ? "least-squares solution is not finite; set ridge > 0"
                : "least-squares solution is not finite despite ridge "
                  "regularization (degenerate sampling?)");
    }
    return WeightVector(theta.data(), theta.data() + theta.size());
}

WeightVector projected_value_iteration(const ScenarioConfig& cfg,
                                       const SolverConfig& solver,
                                       const FeatureLayout& layout,
                                       const IterationLog& log) {
    solver.validate();
    const int threads =
        solver.n_threads > 0 ? solver.n_threads : default_thread_count();
    const auto n_state = static_cast<std::size_t>(solver.n_state);

    WeightVector theta(layout.n_beta, 0.0);
    std::vector<SparseFeatures> rows(n_state);
    std::vector<double> targets(n_state, 0.0);

    for (int k = 0; k < solver.n_vi; ++k) {
        parallel_for(n_state, threads, [&](std::size_t n) {
            const EncounterState s = sample_training_state(
                cfg, layout, solver.seed, static_cast<std::uint64_t>(k), n);
            RngStream noise_rng(stream_key(solver.seed,
                                           StreamPurpose::backup_noise,
                                           static_cast<std::uint64_t>(k), n));
            std::vector<double> noise(static_cast<std::size_t>(solver.n_ev));
            for (double& w : noise) w = noise_rng.next_normal(cfg.sigma_turn);
            targets[n] = backup_sample(s, theta, cfg, solver, layout, noise);
            rows[n] = beta(s, layout, cfg);
        });

        theta = fit_least_squares(rows, targets, solver.ridge, layout.n_beta);

        if (log) {
            IterationStats stats;
            stats.iteration = k;
            double ss = 0.0, mx = 0.0;
            for (std::size_t n = 0; n < n_state; ++n) {
                const double r = rows[n].dot(theta) - targets[n];
                ss += r * r;
                mx = std::max(mx, std::abs(targets[n]));
            }
            stats.fit_rms_residual =
                std::sqrt(ss / static_cast<double>(n_state));
            double tn = 0.0;
            for (const double t : theta) tn += t * t;
            stats.theta_norm = std::sqrt(tn);
            stats.max_abs_target = mx;
            log(stats);
        }
    }
    return theta;
}

double estimate_post_decision_value(const PostDecisionState& q,
                                    const WeightVector& theta,
                                    const ScenarioConfig& cfg,
                                    const FeatureLayout& layout,
                                    std::span<const double> noise) {
    double acc = 0.0;
    for (const double w : noise) {
        acc += beta(complete_post_decision(q, w, cfg), layout, cfg).dot(theta);
    }
    return acc / static_cast<double>(noise.size());
}

WeightVector extract_post_decision_weights(const WeightVector& theta,
                                           const ScenarioConfig& cfg,
                                           const SolverConfig& solver,
                                           const FeatureLayout& layout) {
    solver.validate();
    if (theta.size() != layout.n_beta) {
        throw ConfigError("theta length does not match feature layout");
    }
    const int threads =
        solver.n_threads > 0 ? solver.n_threads : default_thread_count();
    const auto n_q = static_cast<std::size_t>(solver.n_q);

    std::vector<SparseFeatures> rows(n_q);
    std::vector<double> targets(n_q, 0.0);

    parallel_for(n_q, threads, [&](std::size_t n) {
        // Post-decision samples reuse the training-state scheme, read as
        // (own at t+1, intruder at t, dev at t+1).
        RngStream state_rng(
            stream_key(solver.seed, StreamPurpose::pd_states, 0, n));
        const EncounterState raw =
            sample_state_from_stream(cfg, layout, state_rng);
        PostDecisionState q;
        q.own_next = raw.own;
        q.intruder_now = raw.intruder;
        q.dev_next = raw.dev;
        q.terminal = false;

        RngStream noise_rng(
            stream_key(solver.seed, StreamPurpose::pd_noise, 0, n));
        std::vector<double> noise(static_cast<std::size_t>(solver.n_ev));
        for (double& w : noise) w = noise_rng.next_normal(cfg.sigma_turn);
        targets[n] = estimate_post_decision_value(q, theta, cfg, layout, noise);
        rows[n] = beta(q, layout, cfg);
    });

    return fit_least_squares(rows, targets, solver.ridge, layout.n_beta);
}

}  // namespace sepopt
