#include "sepopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sepopt/errors.hpp"

namespace sepopt {

Scale parse_scale(const std::string& name) {
    if (name == "paper") return Scale::paper;
    if (name == "desk") return Scale::desk;
    throw ConfigError("unknown scale '" + name + "' (expected desk or paper)");
}

const char* scale_name(Scale s) {
    return s == Scale::paper ? "paper" : "desk";
}

std::vector<double> RunConfig::separation_actions() const {
    return actions_d.empty() ? default_separation_actions(scenario)
                             : actions_d;
}

std::vector<double> RunConfig::turn_rate_actions() const {
    return actions_turn.empty() ? default_turn_rate_actions(scenario)
                                : actions_turn;
}

void RunConfig::validate() const {
    scenario.validate();
    if (solver.n_state < 1) throw ConfigError("n_state must be >= 1");
    if (solver.n_ev < 1) throw ConfigError("n_ev must be >= 1");
    if (solver.n_vi < 1) throw ConfigError("n_vi must be >= 1");
    if (solver.n_q < 1) throw ConfigError("n_q must be >= 1");
    if (solver.ridge < 0.0) throw ConfigError("ridge must be >= 0");
    if (!(solver.gamma > 0.0) || solver.gamma > 1.0) {
        throw ConfigError("gamma must be in (0, 1]");
    }
    if (eval.unfiltered_episodes < 1 || eval.filtered_episodes < 1) {
        throw ConfigError("episode counts must be >= 1");
    }
    if (!(slice.spacing > 0.0)) throw ConfigError("slice_spacing must be > 0");
    if (n_state_direct < 1) throw ConfigError("n_state_direct must be >= 1");
}

RunConfig default_run_config(Scale scale) {
    RunConfig config;
    if (scale == Scale::desk) {
        config.solver.n_state = 4000;
        config.solver.n_vi = 20;
        config.solver.n_q = 20000;
        config.eval.unfiltered_episodes = 2000;
        config.eval.filtered_episodes = 2000;
        config.sweeps.lambda_optimized = {316.0, 1000.0, 3160.0};
        config.sweeps.lambda_direct = {300.0, 700.0, 1500.0};
        config.n_state_direct = 4000;
    }
    return config;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as a number");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as an integer");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as an unsigned integer");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + value +
                      "' as a boolean");
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError("key '" + key + "': empty list");
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto dbl = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k,
                              const std::string& v) {
                member(c) = parse_double(k, v);
            };
        };
        auto deg = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k,
                              const std::string& v) {
                member(c) = deg2rad(parse_double(k, v));
            };
        };
        auto integer = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k,
                              const std::string& v) {
                member(c) = parse_int(k, v);
            };
        };
        auto boolean = [&t](const std::string& key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& k,
                              const std::string& v) {
                member(c) = parse_bool(k, v);
            };
        };

        dbl("own_speed_mps", [](RunConfig& c) -> double& { return c.scenario.own_speed; });
        dbl("intruder_speed_mps", [](RunConfig& c) -> double& { return c.scenario.intruder_speed; });
        deg("max_turn_rate_deg_s", [](RunConfig& c) -> double& { return c.scenario.max_turn_rate; });
        deg("sigma_turn_deg_s", [](RunConfig& c) -> double& { return c.scenario.sigma_turn; });
        dbl("d_nmac_m", [](RunConfig& c) -> double& { return c.scenario.d_nmac; });
        dbl("d_goal_m", [](RunConfig& c) -> double& { return c.scenario.d_goal; });
        dbl("goal_x_m", [](RunConfig& c) -> double& { return c.scenario.goal_x; });
        dbl("goal_y_m", [](RunConfig& c) -> double& { return c.scenario.goal_y; });
        dbl("dt_s", [](RunConfig& c) -> double& { return c.scenario.dt; });
        integer("max_steps", [](RunConfig& c) -> int& { return c.scenario.max_steps; });
        dbl("c_step", [](RunConfig& c) -> double& { return c.scenario.c_step; });
        dbl("r_goal", [](RunConfig& c) -> double& { return c.scenario.r_goal; });
        dbl("c_dev", [](RunConfig& c) -> double& { return c.scenario.c_dev; });
        dbl("lambda", [](RunConfig& c) -> double& { return c.scenario.lambda; });
        integer("trl_n_headings", [](RunConfig& c) -> int& { return c.scenario.trl.n_headings; });

        boolean("intruder_group", [](RunConfig& c) -> bool& { return c.scenario.features.intruder_group; });
        integer("intruder_dist_nodes", [](RunConfig& c) -> int& { return c.scenario.features.intruder_dist_nodes; });
        dbl("intruder_dist_min_m", [](RunConfig& c) -> double& { return c.scenario.features.intruder_dist_min; });
        dbl("intruder_dist_max_m", [](RunConfig& c) -> double& { return c.scenario.features.intruder_dist_max; });
        integer("intruder_bearing_nodes", [](RunConfig& c) -> int& { return c.scenario.features.intruder_bearing_nodes; });
        integer("intruder_heading_nodes", [](RunConfig& c) -> int& { return c.scenario.features.intruder_heading_nodes; });
        boolean("goal_group", [](RunConfig& c) -> bool& { return c.scenario.features.goal_group; });
        integer("goal_dist_nodes", [](RunConfig& c) -> int& { return c.scenario.features.goal_dist_nodes; });
        dbl("goal_dist_max_m", [](RunConfig& c) -> double& { return c.scenario.features.goal_dist_max; });
        integer("goal_bearing_nodes", [](RunConfig& c) -> int& { return c.scenario.features.goal_bearing_nodes; });

        dbl("box_x_min_m", [](RunConfig& c) -> double& { return c.scenario.box.x_min; });
        dbl("box_x_max_m", [](RunConfig& c) -> double& { return c.scenario.box.x_max; });
        dbl("box_y_min_m", [](RunConfig& c) -> double& { return c.scenario.box.y_min; });
        dbl("box_y_max_m", [](RunConfig& c) -> double& { return c.scenario.box.y_max; });

        dbl("spawn_center_x_m", [](RunConfig& c) -> double& { return c.scenario.spawn.center_x; });
        dbl("spawn_center_y_m", [](RunConfig& c) -> double& { return c.scenario.spawn.center_y; });
        dbl("spawn_radius_min_m", [](RunConfig& c) -> double& { return c.scenario.spawn.radius_min; });
        dbl("spawn_radius_max_m", [](RunConfig& c) -> double& { return c.scenario.spawn.radius_max; });
        deg("spawn_heading_half_width_deg", [](RunConfig& c) -> double& { return c.scenario.spawn.heading_half_width; });

        integer("n_state", [](RunConfig& c) -> int& { return c.solver.n_state; });
        integer("n_ev", [](RunConfig& c) -> int& { return c.solver.n_ev; });
        integer("n_vi", [](RunConfig& c) -> int& { return c.solver.n_vi; });
        integer("n_q", [](RunConfig& c) -> int& { return c.solver.n_q; });
        dbl("ridge", [](RunConfig& c) -> double& { return c.solver.ridge; });
        dbl("gamma", [](RunConfig& c) -> double& { return c.solver.gamma; });
        integer("n_threads", [](RunConfig& c) -> int& { return c.solver.n_threads; });
        integer("n_state_direct", [](RunConfig& c) -> int& { return c.n_state_direct; });
        t["seed"] = [](RunConfig& c, const std::string& k,
                       const std::string& v) {
            c.solver.seed = parse_u64(k, v);
        };

        t["actions_d_m"] = [](RunConfig& c, const std::string& k,
                              const std::string& v) {
            c.actions_d = parse_list(k, v);
        };
        t["actions_turn_deg_s"] = [](RunConfig& c, const std::string& k,
                                     const std::string& v) {
            c.actions_turn = parse_list(k, v);
            for (double& r : c.actions_turn) r = deg2rad(r);
        };

        integer("eval_unfiltered_episodes", [](RunConfig& c) -> int& { return c.eval.unfiltered_episodes; });
        integer("eval_filtered_episodes", [](RunConfig& c) -> int& { return c.eval.filtered_episodes; });

        t["lambda_list_optimized"] = [](RunConfig& c, const std::string& k,
                                        const std::string& v) {
            c.sweeps.lambda_optimized = parse_list(k, v);
        };
        t["lambda_list_direct"] = [](RunConfig& c, const std::string& k,
                                     const std::string& v) {
            c.sweeps.lambda_direct = parse_list(k, v);
        };
        t["dbar_list_m"] = [](RunConfig& c, const std::string& k,
                              const std::string& v) {
            c.sweeps.dbar_m = parse_list(k, v);
        };

        dbl("slice_spacing_m", [](RunConfig& c) -> double& { return c.slice.spacing; });
        dbl("slice_intruder_x_m", [](RunConfig& c) -> double& { return c.slice.intruder.x; });
        dbl("slice_intruder_y_m", [](RunConfig& c) -> double& { return c.slice.intruder.y; });
        deg("slice_intruder_heading_deg", [](RunConfig& c) -> double& { return c.slice.intruder.psi; });
        deg("slice_own_heading_deg", [](RunConfig& c) -> double& { return c.slice.own_heading; });
        return t;
    }();
    return table;
}

}  // namespace

std::vector<std::string> config_key_names() {
    std::vector<std::string> keys;
    keys.reserve(setters().size());
    for (const auto& [key, _] : setters()) keys.push_back(key);
    return keys;
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
        std::string msg = "unknown config key '" + key + "'; valid keys:";
        for (const auto& k : config_key_names()) msg += "\n  " + k;
        throw ConfigError(msg);
    }
    it->second(config, key, value);
}

RunConfig load_config(const std::string& path, Scale scale) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    RunConfig config = default_run_config(scale);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        apply_config_entry(config, key, value);
    }
    config.validate();
    return config;
}

}  // namespace sepopt
