#pragma once

#include <cmath>
#include <numbers>

namespace sepopt {

inline constexpr double kPi = std::numbers::pi;

// Below this magnitude a commanded turn rate is treated as straight flight
// (the arc update would divide by it).
inline constexpr double kTurnRateEps = 1e-9;  // rad/s

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Reduce an angle to [-pi, pi).
inline double wrap_angle(double a) {
    double r = a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
    // floor can land on either edge for values near odd multiples of pi
    if (r >= kPi) r -= 2.0 * kPi;
    if (r < -kPi) r += 2.0 * kPi;
    return r;
}

// Planar vehicle state in a north-east frame: x north, y east, heading
// measured from +x toward +y, kept in [-pi, pi).
struct VehicleState {
    double x = 0.0;    // m
    double y = 0.0;    // m
    double psi = 0.0;  // rad

    bool operator==(const VehicleState&) const = default;
};

struct VehicleParams {
    double speed = 0.0;          // m/s, constant
    double max_turn_rate = 0.0;  // rad/s
};

// Constant-speed, constant-turn-rate update over one step of length dt.
// Straight flight below kTurnRateEps, circular arc otherwise.
inline VehicleState step_vehicle(const VehicleState& s, double speed,
                                 double turn_rate, double dt) {
    VehicleState out = s;
    if (std::abs(turn_rate) < kTurnRateEps) {
        out.x = s.x + speed * std::cos(s.psi) * dt;
        out.y = s.y + speed * std::sin(s.psi) * dt;
    } else {
        const double psi_next = s.psi + turn_rate * dt;
        out.x = s.x + speed * (std::sin(psi_next) - std::sin(s.psi)) / turn_rate;
        out.y = s.y - speed * (std::cos(psi_next) - std::cos(s.psi)) / turn_rate;
        out.psi = wrap_angle(psi_next);
    }
    return out;
}

// Intruder update: random turn rate w held constant over the step.
inline VehicleState step_intruder(const VehicleState& s,
                                  const VehicleParams& params, double w,
                                  double dt) {
    return step_vehicle(s, params.speed, w, dt);
}

}  // namespace sepopt
