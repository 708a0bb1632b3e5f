#include "sepopt/trl.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sepopt/encounter.hpp"
#include "sepopt/kernels.hpp"

namespace sepopt {

double pairwise_distance(const EncounterState& s, const ScenarioConfig& cfg,
                         double psi_cand, double tau) {
    const CpaGeometry g = make_cpa_geometry(s.own, s.intruder, cfg.own_speed,
                                            cfg.intruder_speed);
    return cpa_distance_at(g, std::cos(psi_cand), std::sin(psi_cand), tau);
}

double tau_min(const EncounterState& s, const ScenarioConfig& cfg,
               double psi_cand) {
    const CpaGeometry g = make_cpa_geometry(s.own, s.intruder, cfg.own_speed,
                                            cfg.intruder_speed);
    return cpa_tau_min(g, std::cos(psi_cand), std::sin(psi_cand));
}

double d_min(const EncounterState& s, const ScenarioConfig& cfg,
             double psi_cand) {
    const CpaGeometry g = make_cpa_geometry(s.own, s.intruder, cfg.own_speed,
                                            cfg.intruder_speed);
    return cpa_dmin(g, std::cos(psi_cand), std::sin(psi_cand));
}

double bearing_to_goal(const VehicleState& own, const ScenarioConfig& cfg) {
    return std::atan2(cfg.goal_y - own.y, cfg.goal_x - own.x);
}

TrlResolution trl_resolve_full(const EncounterState& s, double separation,
                               const ScenarioConfig& cfg) {
    const int n_headings = cfg.trl.n_headings;
    const int count = cfg.trl.candidate_count();

    std::vector<double> cos_c(count), sin_c(count), dmin(count);
    for (int i = 0; i < count; ++i) {
        const double psi = candidate_heading(s.own.psi, i - n_headings,
                                             n_headings);
        cos_c[i] = std::cos(psi);
        sin_c[i] = std::sin(psi);
    }

    const CpaGeometry g = make_cpa_geometry(s.own, s.intruder, cfg.own_speed,
                                            cfg.intruder_speed);
    kernels::dmin_sweep(g, cos_c.data(), sin_c.data(), dmin.data(),
                        static_cast<std::size_t>(count));

    double d_star = dmin[0];
    for (int i = 1; i < count; ++i) d_star = std::max(d_star, dmin[i]);

    const bool inescapable = d_star < separation;
    const double psi_goal = bearing_to_goal(s.own, cfg);

    // Among the admissible candidates, pick the one closest to the goal
    // bearing; ties go to the lower index. Track the offset the full set
    // could attain, which the deviation check compares against.
    int best = -1;
    double best_offset = 0.0;
    double attainable = 0.0;
    for (int i = 0; i < count; ++i) {
        const double psi = candidate_heading(s.own.psi, i - n_headings,
                                             n_headings);
        const double offset = std::abs(wrap_angle(psi - psi_goal));
        if (i == 0 || offset < attainable) attainable = offset;
        const bool admissible = inescapable ? (dmin[i] >= d_star - kDstarSlack)
                                            : (dmin[i] >= separation);
        if (!admissible) continue;
        if (best < 0 || offset < best_offset - kGoalTieEps) {
            best = i;
            best_offset = offset;
        }
    }

    TrlResolution res;
    res.candidate_index = best - n_headings;
    res.heading = wrap_angle(
        candidate_heading(s.own.psi, res.candidate_index, n_headings));
    res.inescapable = inescapable;
    res.goal_offset = best_offset;
    res.best_attainable_offset = attainable;
    return res;
}

double trl_resolve(const EncounterState& s, double separation,
                   const ScenarioConfig& cfg) {
    return trl_resolve_full(s, separation, cfg).heading;
}

double track_controller(const VehicleState& own, double psi_resolution,
                        const VehicleParams& params, double dt) {
    const double rate = wrap_angle(psi_resolution - own.psi) / dt;
    return std::clamp(rate, -params.max_turn_rate, params.max_turn_rate);
}

}  // namespace sepopt
