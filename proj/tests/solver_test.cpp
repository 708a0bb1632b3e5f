#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sepopt/errors.hpp"
#include "sepopt/solver.hpp"
#include "support/test_util.hpp"

using namespace sepopt;

namespace {

// Reduced grids keep the least-squares solves cheap in unit tests.
ScenarioConfig small_cfg() {
    ScenarioConfig cfg;
    cfg.features.intruder_dist_nodes = 6;
    cfg.features.intruder_bearing_nodes = 6;
    cfg.features.intruder_heading_nodes = 6;
    cfg.features.goal_dist_nodes = 5;
    cfg.features.goal_bearing_nodes = 5;
    return cfg;
}

// Constant-feature-only problem with no reachable goal or NMAC region, so
// the Bellman recursion collapses to the scalar map v <- -c_step + gamma*v.
ScenarioConfig toy_cfg() {
    ScenarioConfig cfg;
    cfg.features.intruder_group = false;
    cfg.features.goal_group = false;
    cfg.goal_x = 1e9;
    cfg.goal_y = 1e9;
    cfg.d_goal = 1.0;
    cfg.d_nmac = 1e-6;
    cfg.r_goal = 0.0;
    cfg.c_dev = 0.0;
    cfg.lambda = 0.0;
    cfg.c_step = 1.0;
    return cfg;
}

SolverConfig toy_solver(double gamma) {
    SolverConfig solver;
    solver.n_state = 64;
    solver.n_ev = 20;
    solver.n_vi = 35;
    solver.n_q = 64;
    solver.ridge = 0.0;
    solver.gamma = gamma;
    solver.seed = 7;
    solver.n_threads = 2;
    return solver;
}

// Dense normal-equations oracle: Gaussian elimination with partial
// pivoting, independent of the production solve path.
std::vector<double> gauss_normal_equations(
    const std::vector<SparseFeatures>& rows,
    const std::vector<double>& targets, double ridge, std::size_t n) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto dense = rows[r].to_dense(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (dense[i] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] += dense[i] * dense[j];
            }
            a[i][n] += dense[i] * targets[r];
        }
    }
    for (std::size_t i = 0; i < n; ++i) a[i][i] += ridge;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = a[i][n];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return x;
}

SparseFeatures make_row(std::initializer_list<std::pair<int, double>> items) {
    SparseFeatures f;
    for (const auto& [idx, val] : items) {
        f.push(static_cast<std::uint32_t>(idx), val);
    }
    return f;
}

}  // namespace

TEST_CASE("single constant-feature sample fits the target exactly") {
    const auto theta =
        fit_least_squares({make_row({{0, 1.0}})}, {4.25}, 0.0, 1);
    REQUIRE(theta.size() == 1);
    CHECK(theta[0] == doctest::Approx(4.25).epsilon(1e-14));
}

TEST_CASE("an exactly determined system is solved with zero residual") {
    const std::vector<SparseFeatures> rows = {
        make_row({{0, 1.0}, {1, 2.0}}),
        make_row({{0, 3.0}, {1, -1.0}}),
    };
    const std::vector<double> targets = {5.0, 1.0};
    const auto theta = fit_least_squares(rows, targets, 0.0, 2);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        CHECK(rows[r].dot(theta) == doctest::Approx(targets[r]).epsilon(1e-12));
    }
}

TEST_CASE("overdetermined fits agree with the elimination oracle") {
    RngStream rng(61);
    const std::size_t n = 12;
    std::vector<SparseFeatures> rows;
    std::vector<double> targets;
    for (int r = 0; r < 120; ++r) {
        SparseFeatures f;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (rng.next_uniform() < 0.4) {
                f.push(static_cast<std::uint32_t>(j),
                       rng.next_uniform(-2.0, 2.0));
            }
        }
        f.push(static_cast<std::uint32_t>(n - 1), 1.0);
        rows.push_back(f);
        targets.push_back(rng.next_uniform(-10.0, 10.0));
    }
    const auto theta = fit_least_squares(rows, targets, 1e-8, n);
    const auto oracle = gauss_normal_equations(rows, targets, 1e-8, n);
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(theta[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
    }
}

TEST_CASE("singular systems demand ridge regularization") {
    // feature 1 never observed
    const std::vector<SparseFeatures> rows = {make_row({{0, 1.0}}),
                                              make_row({{0, 2.0}})};
    CHECK_THROWS_AS(fit_least_squares(rows, {1.0, 2.0}, 0.0, 2), NumericError);
    try {
        fit_least_squares(rows, {1.0, 2.0}, 0.0, 2);
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("ridge") != std::string::npos);
    }
    // with ridge the unobserved weight collapses to zero
    const auto theta = fit_least_squares(rows, {1.0, 2.0}, 1e-6, 2);
    CHECK(theta[1] == 0.0);
}

TEST_CASE("a quiet state one step from nothing backs up to -c_step") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    SolverConfig solver;
    solver.actions = default_separation_actions(cfg);

    EncounterState s;
    s.own = VehicleState{0.0, 0.0, 0.0};  // pointed at the goal
    s.intruder = VehicleState{-3000.0, 2500.0, 1.0};

    const WeightVector theta(layout.n_beta, 0.0);
    const std::vector<double> noise = {0.1, -0.2, 0.05};
    CHECK(backup_sample(s, theta, cfg, solver, layout, noise) ==
          doctest::Approx(-1.0));
}

TEST_CASE("zero noise reduces the backup to one deterministic transition") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    SolverConfig solver;
    solver.actions = default_separation_actions(cfg);

    RngStream rng(62);
    WeightVector theta(layout.n_beta);
    for (auto& t : theta) t = rng.next_uniform(-5.0, 5.0);

    for (int i = 0; i < 50; ++i) {
        const EncounterState s = test::random_state(rng, cfg, 200.0, 2000.0);
        const std::vector<double> zero_noise(20, 0.0);
        const double via_backup =
            backup_sample(s, theta, cfg, solver, layout, zero_noise);

        double expected = -1e300;
        for (const double d : solver.actions) {
            const double v =
                reward(s, d, cfg) +
                value(transition(s, d, 0.0, cfg), theta, layout, cfg);
            expected = std::max(expected, v);
        }
        CHECK(via_backup == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("single-action backups average the sampled completions") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    SolverConfig solver;
    solver.actions = {300.0};

    RngStream rng(63);
    WeightVector theta(layout.n_beta);
    for (auto& t : theta) t = rng.next_uniform(-5.0, 5.0);

    const EncounterState s = test::random_state(rng, cfg, 300.0, 1500.0);
    const std::vector<double> noise = {0.12, -0.31, 0.07, 0.22};

    double acc = 0.0;
    for (const double w : noise) {
        acc += value(transition(s, 300.0, w, cfg), theta, layout, cfg);
    }
    const double expected = reward(s, 300.0, cfg) + acc / 4.0;
    CHECK(backup_sample(s, theta, cfg, solver, layout, noise) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("noise draws are shared across actions within a backup") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    RngStream rng(64);
    WeightVector theta(layout.n_beta);
    for (auto& t : theta) t = rng.next_uniform(-5.0, 5.0);

    SolverConfig solver;
    solver.actions = {152.4, 457.2};
    const EncounterState s = test::random_state(rng, cfg, 300.0, 1200.0);
    const std::vector<double> noise = {0.3, -0.1};

    double best = -1e300;
    for (const double d : solver.actions) {
        double acc = 0.0;
        for (const double w : noise) {
            acc += value(transition(s, d, w, cfg), theta, layout, cfg);
        }
        best = std::max(best, reward(s, d, cfg) + acc / 2.0);
    }
    CHECK(backup_sample(s, theta, cfg, solver, layout, noise) ==
          doctest::Approx(best).epsilon(1e-12));

    // each normal deviate consumes exactly two raw draws
    RngStream stream(99);
    const auto before = stream.draw_count();
    stream.next_normal();
    CHECK(stream.draw_count() - before == 2);
}

TEST_CASE("zero-reward problems keep theta identically zero") {
    ScenarioConfig cfg = small_cfg();
    cfg.c_step = 0.0;
    cfg.r_goal = 0.0;
    cfg.c_dev = 0.0;
    cfg.lambda = 0.0;
    const FeatureLayout layout = make_feature_layout(cfg);

    SolverConfig solver;
    solver.n_state = 200;
    solver.n_ev = 5;
    solver.n_vi = 35;
    solver.actions = default_separation_actions(cfg);
    solver.seed = 11;
    solver.n_threads = 2;

    const WeightVector theta =
        projected_value_iteration(cfg, solver, layout);
    for (const double t : theta) CHECK(t == 0.0);
}

TEST_CASE("constant-feature problems follow the scalar recursion") {
    const ScenarioConfig cfg = toy_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    REQUIRE(layout.n_beta == 1);

    SUBCASE("undiscounted: theta walks to -n_vi exactly") {
        SolverConfig solver = toy_solver(1.0);
        solver.actions = default_separation_actions(cfg);
        const WeightVector theta =
            projected_value_iteration(cfg, solver, layout);
        REQUIRE(theta.size() == 1);
        CHECK(theta[0] == -35.0);
    }

    SUBCASE("discounted: geometric fixed-point trajectory") {
        const double gamma = 0.9;
        SolverConfig solver = toy_solver(gamma);
        solver.actions = default_separation_actions(cfg);
        const WeightVector theta =
            projected_value_iteration(cfg, solver, layout);
        // closed form after K rounds from theta_0 = 0
        const double expected =
            -(1.0 - std::pow(gamma, 35)) / (1.0 - gamma);
        CHECK(std::abs(theta[0] - expected) < 1e-9);
    }
}

TEST_CASE("training is bitwise reproducible across thread counts") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);

    SolverConfig solver;
    solver.n_state = 300;
    solver.n_ev = 8;
    solver.n_vi = 3;
    solver.n_q = 300;
    solver.seed = 17;
    solver.actions = default_separation_actions(cfg);

    solver.n_threads = 1;
    const WeightVector theta_1 = projected_value_iteration(cfg, solver, layout);
    const WeightVector q_1 =
        extract_post_decision_weights(theta_1, cfg, solver, layout);

    solver.n_threads = 8;
    const WeightVector theta_8 = projected_value_iteration(cfg, solver, layout);
    const WeightVector q_8 =
        extract_post_decision_weights(theta_8, cfg, solver, layout);

    CHECK(theta_1 == theta_8);
    CHECK(q_1 == q_8);
}

TEST_CASE("training states sit on intruder-grid nodes") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    for (std::uint64_t n = 0; n < 300; ++n) {
        const EncounterState s =
            sample_training_state(cfg, layout, 5, 0, n);
        CHECK(!s.terminal);
        const IntruderRelState rel = intruder_rel_state(s.own, s.intruder);
        const double p[3] = {rel.distance, rel.bearing_from_intruder,
                             rel.relative_heading};
        const auto w = layout.intruder_grid.weights(p);
        REQUIRE(w.count == 1);
        CHECK(w.items[0].value == 1.0);
        CHECK(s.own.x >= cfg.box.x_min);
        CHECK(s.own.x <= cfg.box.x_max);
        // bitwise reproducible
        CHECK(sample_training_state(cfg, layout, 5, 0, n) == s);
    }
}

TEST_CASE("post-decision extraction: zero weights stay zero, zero noise is "
          "deterministic") {
    ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    SolverConfig solver;
    solver.n_state = 100;
    solver.n_ev = 6;
    solver.n_q = 200;
    solver.seed = 23;
    solver.n_threads = 2;
    solver.actions = default_separation_actions(cfg);

    const WeightVector zero(layout.n_beta, 0.0);
    const WeightVector q_zero =
        extract_post_decision_weights(zero, cfg, solver, layout);
    for (const double t : q_zero) CHECK(t == 0.0);

    // sigma = 0: the estimate is exactly the deterministic completion
    RngStream rng(65);
    WeightVector theta(layout.n_beta);
    for (auto& t : theta) t = rng.next_uniform(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const EncounterState raw = test::random_state(rng, cfg, 200.0, 2000.0);
        PostDecisionState q;
        q.own_next = raw.own;
        q.intruder_now = raw.intruder;
        q.dev_next = raw.dev;

        const std::vector<double> single = {0.0};
        CHECK(estimate_post_decision_value(q, theta, cfg, layout, single) ==
              value(complete_post_decision(q, 0.0, cfg), theta, layout, cfg));

        const std::vector<double> many(20, 0.0);
        CHECK(estimate_post_decision_value(q, theta, cfg, layout, many) ==
              doctest::Approx(estimate_post_decision_value(q, theta, cfg,
                                                           layout, single))
                  .epsilon(1e-12));
    }
}

TEST_CASE("sampled expectation approaches the quadrature oracle") {
    const ScenarioConfig cfg = small_cfg();
    const FeatureLayout layout = make_feature_layout(cfg);
    RngStream rng(66);
    WeightVector theta(layout.n_beta);
    for (auto& t : theta) t = rng.next_uniform(-5.0, 5.0);

    PostDecisionState q;
    q.own_next = VehicleState{400.0, 100.0, 0.2};
    q.intruder_now = VehicleState{900.0, 400.0, -2.0};
    q.dev_next = false;

    // Monte Carlo estimate with many draws
    const int n_draws = 5000;
    RngStream noise(stream_key(3, StreamPurpose::pd_noise, 0, 0));
    double acc = 0.0, acc2 = 0.0;
    for (int m = 0; m < n_draws; ++m) {
        const double w = noise.next_normal(cfg.sigma_turn);
        const double v =
            value(complete_post_decision(q, w, cfg), theta, layout, cfg);
        acc += v;
        acc2 += v * v;
    }
    const double mc_mean = acc / n_draws;
    const double mc_se = std::sqrt(
        (acc2 / n_draws - mc_mean * mc_mean) / static_cast<double>(n_draws));

    // trapezoid quadrature of E[value(h(q, w))], w ~ N(0, sigma^2)
    const int n_quad = 4001;
    const double half_span = 6.0 * cfg.sigma_turn;
    const double h = 2.0 * half_span / (n_quad - 1);
    double quad = 0.0, mass = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double w = -half_span + h * i;
        const double phi = std::exp(-0.5 * w * w /
                                    (cfg.sigma_turn * cfg.sigma_turn));
        const double mult = (i == 0 || i == n_quad - 1) ? 0.5 : 1.0;
        quad += mult * phi *
                value(complete_post_decision(q, w, cfg), theta, layout, cfg);
        mass += mult * phi;
    }
    quad /= mass;

    CHECK(std::abs(mc_mean - quad) < 3.0 * mc_se + 1e-9);
}
