#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sepopt/artifacts.hpp"
#include "sepopt/config.hpp"
#include "sepopt/errors.hpp"
#include "sepopt/kernels.hpp"
#include "sepopt/policies.hpp"
#include "sepopt/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sepopt;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string scale = "paper";
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "flat key = value configuration file");
    cmd->add_option("--out", opts.out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--scale", opts.scale, "problem size: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--lambda", opts.lambda, "NMAC penalty weight override");
    cmd->add_option("--threads", opts.threads, "worker thread count");
}

RunConfig resolve_config(const CommonOpts& opts) {
    const Scale scale = parse_scale(opts.scale);
    RunConfig config = opts.config_path.empty()
                           ? default_run_config(scale)
                           : load_config(opts.config_path, scale);
    if (opts.seed) config.solver.seed = *opts.seed;
    if (opts.lambda) config.scenario.lambda = *opts.lambda;
    if (opts.threads) config.solver.n_threads = *opts.threads;
    config.validate();
    return config;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
}

ParetoFamily::Kind parse_family(const std::string& name) {
    if (name == "static") return ParetoFamily::Kind::static_trl;
    if (name == "optimized-trl") return ParetoFamily::Kind::optimized_trl;
    if (name == "direct") return ParetoFamily::Kind::direct;
    throw ConfigError("unknown family '" + name + "'");
}

// Action kind, action set, and sample count for a trainable family.
void configure_solver(RunConfig& config, ParetoFamily::Kind family) {
    if (family == ParetoFamily::Kind::direct) {
        config.solver.action_kind = Action::Kind::turn_rate;
        config.solver.actions = config.turn_rate_actions();
        config.solver.n_state = config.n_state_direct;
    } else {
        config.solver.action_kind = Action::Kind::separation;
        config.solver.actions = config.separation_actions();
    }
}

std::ofstream open_train_log(const std::string& dir, RunManifest& manifest) {
    const std::string path = (fs::path(dir) / "train_log.jsonl").string();
    std::ofstream log_file(path, std::ios::binary);
    if (!log_file) throw ConfigError("cannot open '" + path + "'");
    manifest.outputs.push_back(path);
    return log_file;
}

IterationLog jsonl_logger(std::ofstream& out) {
    return [&out](const IterationStats& stats) {
        json j;
        j["iteration"] = stats.iteration;
        j["fit_rms_residual"] = stats.fit_rms_residual;
        j["theta_norm"] = stats.theta_norm;
        j["max_abs_target"] = stats.max_abs_target;
        out << j.dump() << "\n";
        out.flush();
    };
}

int cmd_train(const CommonOpts& opts, const std::string& family_name) {
    RunConfig config = resolve_config(opts);
    configure_solver(config, parse_family(family_name));
    ensure_out_dir(opts.out_dir);
    RunManifest manifest = begin_manifest("train");

    const FeatureLayout layout = make_feature_layout(config.scenario);
    std::cout << "training family=" << family_name
              << " lambda=" << config.scenario.lambda
              << " n_state=" << config.solver.n_state
              << " n_vi=" << config.solver.n_vi
              << " n_beta=" << layout.n_beta
              << " kernel=" << kernels::backend_name(kernels::active_backend())
              << "\n";

    std::ofstream log_file = open_train_log(opts.out_dir, manifest);
    const WeightVector theta = projected_value_iteration(
        config.scenario, config.solver, layout, jsonl_logger(log_file));

    const std::string weights_path =
        (fs::path(opts.out_dir) / "weights.json").string();
    save_weights(theta, {}, layout, config, weights_path);
    manifest.outputs.push_back(weights_path);
    write_manifest(manifest, config, opts.out_dir);
    std::cout << "wrote " << weights_path << "\n";
    return 0;
}

int cmd_extract_pd(const CommonOpts& opts, const std::string& weights_path) {
    RunConfig config = resolve_config(opts);
    ensure_out_dir(opts.out_dir);
    RunManifest manifest = begin_manifest("extract-pd");

    const FeatureLayout layout = make_feature_layout(config.scenario);
    const WeightsArtifact artifact = load_weights(weights_path, layout);
    // action sets are irrelevant here; completion only involves noise
    SolverConfig solver = config.solver;
    solver.actions = {0.0};

    const WeightVector theta_q =
        extract_post_decision_weights(artifact.theta, config.scenario, solver,
                                      layout);

    const std::string out_path =
        (fs::path(opts.out_dir) / "weights.json").string();
    save_weights(artifact.theta, theta_q, layout, config, out_path);
    manifest.outputs.push_back(out_path);
    write_manifest(manifest, config, opts.out_dir);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_filter_scenarios(const CommonOpts& opts, int count) {
    RunConfig config = resolve_config(opts);
    ensure_out_dir(opts.out_dir);
    RunManifest manifest = begin_manifest("filter-scenarios");

    const FeatureLayout layout = make_feature_layout(config.scenario);
    const int n = count > 0 ? count : config.eval.filtered_episodes;
    const auto set = generate_nmac_filtered_set(
        n, config.solver.seed, config.scenario, layout,
        config.solver.n_threads);

    const std::string path =
        (fs::path(opts.out_dir) / "scenarios_filtered.csv").string();
    write_scenarios(set, path);
    manifest.outputs.push_back(path);
    write_manifest(manifest, config, opts.out_dir);
    std::cout << "wrote " << path << " (" << set.size() << " scenarios)\n";
    return 0;
}

Policy build_policy(const RunConfig& config, const std::string& family_name,
                    std::optional<double> dbar,
                    const std::string& weights_path,
                    const FeatureLayout& layout) {
    if (family_name == "nominal") return Nominal{};
    if (family_name == "static") {
        if (!dbar) {
            throw ConfigError("--family static requires --dbar");
        }
        return StaticTrl{*dbar};
    }
    if (weights_path.empty()) {
        throw ConfigError("--family " + family_name +
                          " requires --weights (run train and extract-pd "
                          "first)");
    }
    const WeightsArtifact artifact = load_weights(weights_path, layout);
    if (artifact.theta_q.empty()) {
        throw ConfigError("weights artifact '" + weights_path +
                          "' has no post-decision weights; run extract-pd");
    }
    if (family_name == "optimized-trl") {
        return OptimizedTrl{artifact.theta_q, config.separation_actions()};
    }
    if (family_name == "direct") {
        return DirectTurn{artifact.theta_q, config.turn_rate_actions()};
    }
    throw ConfigError("unknown family '" + family_name + "'");
}

int cmd_evaluate(const CommonOpts& opts, const std::string& family_name,
                 std::optional<double> dbar, const std::string& weights_path,
                 const std::string& scenarios_path, int sample_unfiltered) {
    RunConfig config = resolve_config(opts);
    ensure_out_dir(opts.out_dir);
    RunManifest manifest = begin_manifest("evaluate");

    const FeatureLayout layout = make_feature_layout(config.scenario);
    const Policy policy =
        build_policy(config, family_name, dbar, weights_path, layout);

    std::vector<Scenario> set;
    std::string set_desc;
    if (!scenarios_path.empty()) {
        set = read_scenarios(scenarios_path);
        set_desc = scenarios_path;
    } else {
        const int n = sample_unfiltered > 0 ? sample_unfiltered
                                            : config.eval.unfiltered_episodes;
        set = sample_scenarios(config.solver.seed, n, config.scenario);
        set_desc = "sampled:" + std::to_string(n) +
                   ":seed=" + std::to_string(config.solver.seed);
    }

    const EvalReport report = evaluate(policy, set, config.scenario, layout,
                                       config.solver.n_threads);

    const std::string path = (fs::path(opts.out_dir) / "report.json").string();
    write_report(report, family_name, set_desc, path);
    manifest.outputs.push_back(path);
    write_manifest(manifest, config, opts.out_dir);

    std::cout << "episodes=" << report.n_episodes
              << " deviations=" << report.n_deviations
              << " nmacs=" << report.n_nmacs << " goals=" << report.n_goals
              << " timeouts=" << report.n_timeouts
              << " nmac_fraction=" << report.nmac_fraction() << "\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& family_name) {
    RunConfig config = resolve_config(opts);
    ensure_out_dir(opts.out_dir);
    RunManifest manifest = begin_manifest("sweep");

    ParetoFamily family;
    family.kind = parse_family(family_name);
    switch (family.kind) {
        case ParetoFamily::Kind::static_trl:
            family.params = config.sweeps.dbar_m;
            break;
        case ParetoFamily::Kind::optimized_trl:
            family.params = config.sweeps.lambda_optimized;
            break;
        case ParetoFamily::Kind::direct:
            family.params = config.sweeps.lambda_direct;
            break;
    }
    if (family.kind != ParetoFamily::Kind::static_trl) {
        configure_solver(config, family.kind);
    }

    const FeatureLayout layout = make_feature_layout(config.scenario);

    std::cout << "building scenario sets ("
              << config.eval.unfiltered_episodes << " unfiltered, "
              << config.eval.filtered_episodes << " filtered)\n";
    const auto unfiltered = sample_scenarios(
        config.solver.seed, config.eval.unfiltered_episodes, config.scenario);
    const auto filtered = generate_nmac_filtered_set(
        config.eval.filtered_episodes, config.solver.seed + 1,
        config.scenario, layout, config.solver.n_threads);

    const std::string unf_path =
        (fs::path(opts.out_dir) / "scenarios_unfiltered.csv").string();
    const std::string fil_path =
        (fs::path(opts.out_dir) / "scenarios_filtered.csv").string();
    write_scenarios(unfiltered, unf_path);
    write_scenarios(filtered, fil_path);
    manifest.outputs.push_back(unf_path);
    manifest.outputs.push_back(fil_path);

    std::ofstream log_file = open_train_log(opts.out_dir, manifest);
    const auto points =
        pareto_sweep(family, config.scenario, config.solver, unfiltered,
                     filtered, layout, jsonl_logger(log_file));

    const std::string pareto_path =
        (fs::path(opts.out_dir) / "pareto.csv").string();
    write_pareto_csv(family, points, pareto_path);
    manifest.outputs.push_back(pareto_path);
    write_manifest(manifest, config, opts.out_dir);

    for (const auto& p : points) {
        std::cout << family_name << " param=" << p.param;
        if (p.solved) {
            std::cout << " deviations=" << p.deviations
                      << " risk_ratio=" << p.risk_ratio << "\n";
        } else {
            std::cout << " FAILED: " << p.error << "\n";
        }
    }
    std::cout << "wrote " << pareto_path << "\n";
    return 0;
}

int cmd_slice(const CommonOpts& opts, const std::string& weights_path,
              bool policy_slice) {
    RunConfig config = resolve_config(opts);
    ensure_out_dir(opts.out_dir);
    RunManifest manifest =
        begin_manifest(policy_slice ? "slice-policy" : "slice-value");

    const FeatureLayout layout = make_feature_layout(config.scenario);
    const WeightsArtifact artifact = load_weights(weights_path, layout);

    std::string path;
    if (policy_slice) {
        if (artifact.theta_q.empty()) {
            throw ConfigError("weights artifact has no post-decision weights; "
                              "run extract-pd");
        }
        path = (fs::path(opts.out_dir) / "policy_slice.csv").string();
        export_policy_slice(artifact.theta_q, config.separation_actions(),
                            layout, config, path);
    } else {
        path = (fs::path(opts.out_dir) / "value_slice.csv").string();
        export_value_slice(artifact.theta, layout, config, path);
    }
    manifest.outputs.push_back(path);
    write_manifest(manifest, config, opts.out_dir);
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Encounter simulation and separation-parameter optimization "
                 "for a rule-based horizontal collision-avoidance logic"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string family = "optimized-trl";
    std::string weights_path;
    std::string scenarios_path;
    std::optional<double> dbar;
    int count = 0;
    int sample_unfiltered = 0;

    auto* train = app.add_subcommand("train", "fit value-function weights");
    add_common(train, opts);
    train->add_option("--family", family,
                      "optimized-trl or direct")
        ->check(CLI::IsMember({"optimized-trl", "direct"}))
        ->capture_default_str();

    auto* extract = app.add_subcommand(
        "extract-pd", "fit post-decision weights from trained weights");
    add_common(extract, opts);
    extract->add_option("--weights", weights_path, "weights artifact")
        ->required();

    auto* filter = app.add_subcommand(
        "filter-scenarios",
        "generate scenarios that end in an NMAC under the nominal path");
    add_common(filter, opts);
    filter->add_option("--n", count, "number of scenarios to keep");

    auto* eval = app.add_subcommand("evaluate",
                                    "run a policy over a scenario set");
    add_common(eval, opts);
    eval->add_option("--family", family,
                     "nominal, static, optimized-trl, or direct")
        ->check(CLI::IsMember({"nominal", "static", "optimized-trl", "direct"}))
        ->required();
    eval->add_option("--dbar", dbar, "separation parameter for static (m)");
    eval->add_option("--weights", weights_path, "weights artifact");
    eval->add_option("--scenarios", scenarios_path, "scenario CSV to replay");
    eval->add_option("--sample-unfiltered", sample_unfiltered,
                     "sample this many unfiltered scenarios instead");

    auto* sweep = app.add_subcommand(
        "sweep", "trace a deviation/risk-ratio trade-off curve");
    add_common(sweep, opts);
    sweep->add_option("--family", family,
                      "static, optimized-trl, or direct")
        ->check(CLI::IsMember({"static", "optimized-trl", "direct"}))
        ->required();

    auto* slice_value = app.add_subcommand(
        "slice-value", "export a value-function slice as CSV");
    add_common(slice_value, opts);
    slice_value->add_option("--weights", weights_path, "weights artifact")
        ->required();

    auto* slice_policy = app.add_subcommand(
        "slice-policy", "export an optimized-TRL policy slice as CSV");
    add_common(slice_policy, opts);
    slice_policy->add_option("--weights", weights_path, "weights artifact")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) return cmd_train(opts, family);
        if (extract->parsed()) return cmd_extract_pd(opts, weights_path);
        if (filter->parsed()) return cmd_filter_scenarios(opts, count);
        if (eval->parsed()) {
            return cmd_evaluate(opts, family, dbar, weights_path,
                                scenarios_path, sample_unfiltered);
        }
        if (sweep->parsed()) return cmd_sweep(opts, family);
        if (slice_value->parsed()) return cmd_slice(opts, weights_path, false);
        if (slice_policy->parsed()) return cmd_slice(opts, weights_path, true);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
