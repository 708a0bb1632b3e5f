#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sepopt/config.hpp"
#include "sepopt/features.hpp"
#include "sepopt/policies.hpp"

namespace sepopt {

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Resolved-configuration snapshot (internal units: meters, radians,
// seconds) embedded in manifests and weight artifacts.
nlohmann::json config_snapshot(const RunConfig& config);

// Run metadata written next to every command's outputs as manifest.json.
// Timestamps live only here so the data artifacts stay byte-identical
// across reruns of the same command and seed.
struct RunManifest {
    std::string command;
    std::string version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

RunManifest begin_manifest(const std::string& command);
void write_manifest(const RunManifest& manifest, const RunConfig& config,
                    const std::string& dir);

std::string current_timestamp();

// Self-describing weights artifact: grid axes, feature layout sizes, both
// weight vectors (theta_q may be empty before extraction), and the
// deterministic provenance (config snapshot + seed + version).
void save_weights(const WeightVector& theta, const WeightVector& theta_q,
                  const FeatureLayout& layout, const RunConfig& config,
                  const std::string& path);

struct WeightsArtifact {
    WeightVector theta;
    WeightVector theta_q;  // empty when not yet extracted
};

// Throws ConfigError when the stored grids or layout sizes do not match
// the expected layout.
WeightsArtifact load_weights(const std::string& path,
                             const FeatureLayout& expected);

// Scenario sets as CSV (radians in data files; config files use degrees).
void write_scenarios(const std::vector<Scenario>& set,
                     const std::string& path);
std::vector<Scenario> read_scenarios(const std::string& path);

void write_report(const EvalReport& report, const std::string& policy_desc,
                  const std::string& scenarios_path, const std::string& path);

void write_pareto_csv(const ParetoFamily& family,
                      const std::vector<ParetoPoint>& points,
                      const std::string& path);

// Value of the fitted state-value function over own positions in the
// operating box (own heading fixed, intruder fixed); CSV x_m,y_m,value.
void export_value_slice(const WeightVector& theta, const FeatureLayout& layout,
                        const RunConfig& config, const std::string& path);

// Separation parameter chosen by the optimized-TRL policy over the same
// sweep; CSV x_m,y_m,separation_m.
void export_policy_slice(const WeightVector& theta_q,
                         const std::vector<double>& actions,
                         const FeatureLayout& layout, const RunConfig& config,
                         const std::string& path);

}  // namespace sepopt
