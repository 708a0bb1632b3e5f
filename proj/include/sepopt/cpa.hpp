#pragma once

#include <cmath>

#include "sepopt/dynamics.hpp"

namespace sepopt {

// Relative speed-squared below this is treated as parallel, equal-velocity
// geometry: the separation never changes, so the closest approach is now.
inline constexpr double kParallelVelEps = 1e-9;  // (m/s)^2

// Closest-point-of-approach inputs with the own vehicle translated to the
// origin. Both vehicles are extrapolated along straight tracks; only the
// own heading (the candidate) varies across a sweep.
struct CpaGeometry {
    double rel_x = 0.0;    // intruder x - own x at tau = 0
    double rel_y = 0.0;
    double intr_vx = 0.0;  // intruder velocity components
    double intr_vy = 0.0;
    double own_speed = 0.0;
};

inline CpaGeometry make_cpa_geometry(const VehicleState& own,
                                     const VehicleState& intruder,
                                     double own_speed, double intruder_speed) {
    CpaGeometry g;
    g.rel_x = intruder.x - own.x;
    g.rel_y = intruder.y - own.y;
    g.intr_vx = intruder_speed * std::cos(intruder.psi);
    g.intr_vy = intruder_speed * std::sin(intruder.psi);
    g.own_speed = own_speed;
    return g;
}

// Time of closest approach for one candidate heading, clamped to [0, inf).
inline double cpa_tau_min(const CpaGeometry& g, double cos_c, double sin_c) {
    const double dvx = g.intr_vx - g.own_speed * cos_c;
    const double dvy = g.intr_vy - g.own_speed * sin_c;
    const double vv = dvx * dvx + dvy * dvy;
    if (vv < kParallelVelEps) return 0.0;
    const double num = -(g.rel_x * dvx + g.rel_y * dvy);
    const double tau = num / vv;
    return tau > 0.0 ? tau : 0.0;
}

// Separation at time tau for one candidate heading.
inline double cpa_distance_at(const CpaGeometry& g, double cos_c, double sin_c,
                              double tau) {
    const double dvx = g.intr_vx - g.own_speed * cos_c;
    const double dvy = g.intr_vy - g.own_speed * sin_c;
    const double ex = g.rel_x + tau * dvx;
    const double ey = g.rel_y + tau * dvy;
    return std::sqrt(ex * ex + ey * ey);
}

// Minimum separation over all future time for one candidate heading.
//
// This is the scalar reference lane for the SIMD sweep kernels: the AVX2
// path mirrors this exact operation sequence (no FMA contraction), so lane
// results are required to be bit-identical to this function.
inline double cpa_dmin(const CpaGeometry& g, double cos_c, double sin_c) {
    const double dvx = g.intr_vx - g.own_speed * cos_c;
    const double dvy = g.intr_vy - g.own_speed * sin_c;
    const double vv = dvx * dvx + dvy * dvy;
    const double num = -(g.rel_x * dvx + g.rel_y * dvy);
    double tau = num / vv;
    tau = tau > 0.0 ? tau : 0.0;  // NaN (0/0) also lands on 0
    if (vv < kParallelVelEps) tau = 0.0;
    const double ex = g.rel_x + tau * dvx;
    const double ey = g.rel_y + tau * dvy;
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace sepopt
