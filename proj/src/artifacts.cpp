#include "sepopt/artifacts.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sepopt/errors.hpp"

namespace sepopt {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

json grid_to_json(const Grid& grid) {
    json axes = json::array();
    for (const auto& axis : grid.axes) {
        axes.push_back({{"name", axis.name},
                        {"nodes", axis.nodes},
                        {"periodic", axis.periodic}});
    }
    return {{"axes", axes}};
}

Grid grid_from_json(const json& j) {
    Grid grid;
    for (const auto& axis_json : j.at("axes")) {
        GridAxis axis;
        axis.name = axis_json.at("name").get<std::string>();
        axis.nodes = axis_json.at("nodes").get<std::vector<double>>();
        axis.periodic = axis_json.at("periodic").get<bool>();
        if (axis.periodic) axis.period = 2.0 * kPi;
        grid.axes.push_back(std::move(axis));
    }
    return grid;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

}  // namespace

json config_snapshot(const RunConfig& config) {
    const ScenarioConfig& s = config.scenario;
    json j;
    j["own_speed_mps"] = s.own_speed;
    j["intruder_speed_mps"] = s.intruder_speed;
    j["max_turn_rate_rad_s"] = s.max_turn_rate;
    j["sigma_turn_rad_s"] = s.sigma_turn;
    j["d_nmac_m"] = s.d_nmac;
    j["d_goal_m"] = s.d_goal;
    j["goal_m"] = {s.goal_x, s.goal_y};
    j["dt_s"] = s.dt;
    j["max_steps"] = s.max_steps;
    j["c_step"] = s.c_step;
    j["r_goal"] = s.r_goal;
    j["c_dev"] = s.c_dev;
    j["lambda"] = s.lambda;
    j["trl_n_headings"] = s.trl.n_headings;
    j["features"] = {
        {"intruder_group", s.features.intruder_group},
        {"intruder_dist_nodes", s.features.intruder_dist_nodes},
        {"intruder_dist_min_m", s.features.intruder_dist_min},
        {"intruder_dist_max_m", s.features.intruder_dist_max},
        {"intruder_bearing_nodes", s.features.intruder_bearing_nodes},
        {"intruder_heading_nodes", s.features.intruder_heading_nodes},
        {"goal_group", s.features.goal_group},
        {"goal_dist_nodes", s.features.goal_dist_nodes},
        {"goal_dist_max_m", s.features.goal_dist_max},
        {"goal_bearing_nodes", s.features.goal_bearing_nodes},
    };
    j["box_m"] = {s.box.x_min, s.box.x_max, s.box.y_min, s.box.y_max};
    j["spawn"] = {
        {"center_m", {s.spawn.center_x, s.spawn.center_y}},
        {"radius_min_m", s.spawn.radius_min},
        {"radius_max_m", s.spawn.radius_max},
        {"heading_half_width_rad", s.spawn.heading_half_width},
    };
    j["solver"] = {
        {"n_state", config.solver.n_state},
        {"n_ev", config.solver.n_ev},
        {"n_vi", config.solver.n_vi},
        {"n_q", config.solver.n_q},
        {"ridge", config.solver.ridge},
        {"gamma", config.solver.gamma},
        {"seed", config.solver.seed},
        {"actions", config.solver.actions},
        {"action_kind", config.solver.action_kind == Action::Kind::separation
                            ? "separation"
                            : "turn_rate"},
    };
    j["eval"] = {
        {"unfiltered_episodes", config.eval.unfiltered_episodes},
        {"filtered_episodes", config.eval.filtered_episodes},
    };
    j["n_state_direct"] = config.n_state_direct;
    j["sweeps"] = {
        {"lambda_optimized", config.sweeps.lambda_optimized},
        {"lambda_direct", config.sweeps.lambda_direct},
        {"dbar_m", config.sweeps.dbar_m},
    };
    j["slice"] = {
        {"intruder_m",
         {config.slice.intruder.x, config.slice.intruder.y}},
        {"intruder_heading_rad", config.slice.intruder.psi},
        {"own_heading_rad", config.slice.own_heading},
        {"spacing_m", config.slice.spacing},
    };
    return j;
}

RunManifest begin_manifest(const std::string& command) {
    RunManifest m;
    m.command = command;
    m.version = kVersion;
    m.started_at = current_timestamp();
    return m;
}

void write_manifest(const RunManifest& manifest, const RunConfig& config,
                    const std::string& dir) {
    json j;
    j["command"] = manifest.command;
    j["version"] = manifest.version;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at.empty() ? current_timestamp()
                                                    : manifest.finished_at;
    j["outputs"] = manifest.outputs;
    j["config"] = config_snapshot(config);
    write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                    j.dump(2) + "\n");
}

void save_weights(const WeightVector& theta, const WeightVector& theta_q,
                  const FeatureLayout& layout, const RunConfig& config,
                  const std::string& path) {
    json j;
    j["format"] = "sepopt-weights-v1";
    j["version"] = kVersion;
    j["n_beta"] = layout.n_beta;
    j["intruder_enabled"] = layout.intruder_enabled;
    j["goal_enabled"] = layout.goal_enabled;
    if (layout.intruder_enabled) {
        j["intruder_grid"] = grid_to_json(layout.intruder_grid);
    }
    if (layout.goal_enabled) {
        j["goal_grid"] = grid_to_json(layout.goal_grid);
    }
    j["theta"] = theta;
    j["theta_q"] = theta_q;
    j["config"] = config_snapshot(config);
    write_text_file(path, j.dump(2) + "\n");
}

WeightsArtifact load_weights(const std::string& path,
                             const FeatureLayout& expected) {
    const json j = load_json_file(path);
    if (j.value("format", "") != "sepopt-weights-v1") {
        throw ConfigError("'" + path + "' is not a sepopt weights artifact");
    }
    if (j.at("n_beta").get<std::size_t>() != expected.n_beta ||
        j.at("intruder_enabled").get<bool>() != expected.intruder_enabled ||
        j.at("goal_enabled").get<bool>() != expected.goal_enabled) {
        throw ConfigError("weights artifact '" + path +
                          "' is incompatible with the current feature "
                          "configuration (layout size mismatch)");
    }
    if (expected.intruder_enabled &&
        !(grid_from_json(j.at("intruder_grid")) == expected.intruder_grid)) {
        throw ConfigError("weights artifact '" + path +
                          "' was built on a different intruder grid");
    }
    if (expected.goal_enabled &&
        !(grid_from_json(j.at("goal_grid")) == expected.goal_grid)) {
        throw ConfigError("weights artifact '" + path +
                          "' was built on a different goal grid");
    }

    WeightsArtifact artifact;
    artifact.theta = j.at("theta").get<WeightVector>();
    artifact.theta_q = j.at("theta_q").get<WeightVector>();
    if (artifact.theta.size() != expected.n_beta) {
        throw ConfigError("weights artifact '" + path +
                          "' has a theta of the wrong length");
    }
    if (!artifact.theta_q.empty() &&
        artifact.theta_q.size() != expected.n_beta) {
        throw ConfigError("weights artifact '" + path +
                          "' has a theta_q of the wrong length");
    }
    return artifact;
}

void write_scenarios(const std::vector<Scenario>& set,
                     const std::string& path) {
    std::ostringstream out;
    out << "index,intruder_x_m,intruder_y_m,intruder_psi_rad,noise_seed\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        out << i << ',' << format_double(set[i].intruder_initial.x) << ','
            << format_double(set[i].intruder_initial.y) << ','
            << format_double(set[i].intruder_initial.psi) << ','
            << set[i].noise_seed << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<Scenario> read_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) ||
        line != "index,intruder_x_m,intruder_y_m,intruder_psi_rad,noise_seed") {
        throw ConfigError("'" + path + "' is not a sepopt scenario file");
    }
    std::vector<Scenario> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 5 fields");
        }
        Scenario sc;
        try {
            sc.intruder_initial.x = std::stod(fields[1]);
            sc.intruder_initial.y = std::stod(fields[2]);
            sc.intruder_initial.psi = std::stod(fields[3]);
            sc.noise_seed = std::stoull(fields[4]);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": cannot parse scenario fields");
        }
        out.push_back(sc);
    }
    return out;
}

void write_report(const EvalReport& report, const std::string& policy_desc,
                  const std::string& scenarios_path, const std::string& path) {
    json j;
    j["policy"] = policy_desc;
    j["scenarios"] = scenarios_path;
    j["n_episodes"] = report.n_episodes;
    j["n_deviations"] = report.n_deviations;
    j["n_nmacs"] = report.n_nmacs;
    j["n_goals"] = report.n_goals;
    j["n_timeouts"] = report.n_timeouts;
    j["nmac_fraction"] = report.nmac_fraction();
    j["mean_total_reward"] = report.mean_total_reward;
    j["mean_steps"] = report.mean_steps;
    write_text_file(path, j.dump(2) + "\n");
}

void write_pareto_csv(const ParetoFamily& family,
                      const std::vector<ParetoPoint>& points,
                      const std::string& path) {
    std::ostringstream out;
    out << "family,param,solved,deviations,unfiltered_episodes,risk_ratio,"
           "filtered_nmacs,filtered_episodes,unfiltered_nmacs,"
           "unfiltered_goals,unfiltered_timeouts,error\n";
    for (const auto& p : points) {
        out << family_name(family.kind) << ',' << format_double(p.param) << ','
            << (p.solved ? 1 : 0) << ',' << p.deviations << ','
            << p.unfiltered.n_episodes << ',' << format_double(p.risk_ratio)
            << ',' << p.filtered.n_nmacs << ',' << p.filtered.n_episodes << ','
            << p.unfiltered.n_nmacs << ',' << p.unfiltered.n_goals << ','
            << p.unfiltered.n_timeouts << ',' << p.error << '\n';
    }
    write_text_file(path, out.str());
}

namespace {

template <typename PixelFn>
void export_slice(const RunConfig& config, const std::string& header,
                  const std::string& path, PixelFn&& pixel) {
    const OperatingBox& box = config.scenario.box;
    const double spacing = config.slice.spacing;
    std::ostringstream out;
    out << header << '\n';
    for (double x = box.x_min; x <= box.x_max + 1e-9; x += spacing) {
        for (double y = box.y_min; y <= box.y_max + 1e-9; y += spacing) {
            out << format_double(x) << ',' << format_double(y) << ','
                << pixel(x, y) << '\n';
        }
    }
    write_text_file(path, out.str());
}

}  // namespace

void export_value_slice(const WeightVector& theta, const FeatureLayout& layout,
                        const RunConfig& config, const std::string& path) {
    export_slice(config, "x_m,y_m,value", path, [&](double x, double y) {
        EncounterState s;
        s.own = VehicleState{x, y, config.slice.own_heading};
        s.intruder = config.slice.intruder;
        return format_double(value(s, theta, layout, config.scenario));
    });
}

void export_policy_slice(const WeightVector& theta_q,
                         const std::vector<double>& actions,
                         const FeatureLayout& layout, const RunConfig& config,
                         const std::string& path) {
    const Policy policy = OptimizedTrl{theta_q, actions};
    export_slice(config, "x_m,y_m,separation_m", path,
                 [&](double x, double y) {
                     EncounterState s;
                     s.own = VehicleState{x, y, config.slice.own_heading};
                     s.intruder = config.slice.intruder;
                     const Action a = act(policy, s, config.scenario, layout);
                     return format_double(a.value);
                 });
}

}  // namespace sepopt
