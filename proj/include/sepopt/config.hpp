#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sepopt/encounter.hpp"
#include "sepopt/solver.hpp"

namespace sepopt {

inline constexpr const char* kVersion = "sepopt 0.1.0";

// Problem sizes: `paper` runs the full experiment protocol, `desk` a
// reduced one that finishes on a workstation in minutes.
enum class Scale { paper, desk };

Scale parse_scale(const std::string& name);
const char* scale_name(Scale s);

struct EvalParams {
    int unfiltered_episodes = 10000;
    int filtered_episodes = 10000;
};

struct SweepLists {
    std::vector<double> lambda_optimized{100.0, 316.0,   1000.0,
                                         3160.0, 10000.0, 31600.0};
    std::vector<double> lambda_direct{300.0, 500.0, 700.0, 1000.0, 1500.0};
    std::vector<double> dbar_m{250.0, 300.0, 350.0, 400.0, 500.0};
};

struct SliceParams {
    VehicleState intruder{700.0, -250.0, deg2rad(135.0)};
    double own_heading = 0.0;  // rad; slices sweep own position
    double spacing = 20.0;     // m between pixels
};

// Everything a CLI run needs: model constants, solver sizes, evaluation
// protocol, sweep parameter lists, slice-export defaults.
struct RunConfig {
    ScenarioConfig scenario;
    SolverConfig solver;
    EvalParams eval;
    SweepLists sweeps;
    SliceParams slice;
    int n_state_direct = 50000;  // paper-scale override for the direct family

    // Optional action-set overrides; empty means the defaults derived from
    // d_nmac / max_turn_rate.
    std::vector<double> actions_d;     // m
    std::vector<double> actions_turn;  // rad/s

    std::vector<double> separation_actions() const;
    std::vector<double> turn_rate_actions() const;

    void validate() const;
};

// Defaults for a scale profile (paper values unless desk-scale reductions
// apply). The solver action set is left empty; commands fill it for the
// family they run.
RunConfig default_run_config(Scale scale);

// Flat key = value text file; unknown keys and invariant violations throw
// ConfigError. Angles are degrees in the file, radians internally. Missing
// keys keep the profile defaults.
RunConfig load_config(const std::string& path, Scale scale);

// Apply one key/value pair (the file loader and CLI overrides share this).
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

// Sorted list of recognized keys, for error messages and docs.
std::vector<std::string> config_key_names();

}  // namespace sepopt
