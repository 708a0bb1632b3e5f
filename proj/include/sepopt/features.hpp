#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sepopt/encounter.hpp"

namespace sepopt {

// Cell fractions closer than this to a node collapse onto it, so states
// reconstructed from node coordinates stay exactly one-hot despite rounding.
inline constexpr double kNodeSnapEps = 1e-9;

struct GridAxis {
    std::string name;
    std::vector<double> nodes;  // strictly increasing
    bool periodic = false;
    double period = 0.0;  // wraparound span when periodic
};

GridAxis uniform_axis(std::string name, double lo, double hi, int count);
// Nodes at -pi + k * 2pi/count, interpolation wraps across the seam.
GridAxis periodic_angle_axis(std::string name, int count);

// Location of a point along one axis: enclosing cell plus fraction.
struct AxisCell {
    int lo = 0;
    int hi = 0;
    double frac = 0.0;  // 0 at lo, 1 at hi
};

AxisCell locate_on_axis(const GridAxis& axis, double p);
int nearest_on_axis(const GridAxis& axis, double p);

// Tensor-product multilinear interpolation grid over up to three axes.
// Out-of-range points clamp to the boundary (constant extrapolation), so
// the weights always form a partition of unity.
struct Grid {
    static constexpr int kMaxAxes = 3;
    static constexpr int kMaxCorners = 8;

    std::vector<GridAxis> axes;

    std::size_t node_count() const;

    struct Weight {
        std::uint32_t index = 0;
        double value = 0.0;
    };
    struct WeightList {
        std::array<Weight, kMaxCorners> items{};
        int count = 0;

        void push(std::uint32_t index, double value) {
            items[static_cast<std::size_t>(count++)] = {index, value};
        }
    };

    // Nonzero corner weights for a point (one entry per axis in `point`).
    WeightList weights(const double* point) const;

    // Flat index of the closest node (per-axis nearest).
    std::uint32_t nearest_node(const double* point) const;

    // Coordinates of a node given its flat index.
    void node_coords(std::uint32_t flat, double* out) const;

    bool operator==(const Grid&) const;
};

// Sparse feature vector: indices into the dense beta layout with their
// values. Capacity covers the worst case of the default architecture.
struct SparseFeatures {
    static constexpr int kCapacity = 16;

    struct Entry {
        std::uint32_t index = 0;
        double value = 0.0;
    };
    std::array<Entry, kCapacity> entries{};
    int count = 0;

    void push(std::uint32_t index, double value) {
        if (value == 0.0) return;
        entries[static_cast<std::size_t>(count++)] = {index, value};
    }

    double dot(const std::vector<double>& theta) const {
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            acc += theta[entries[static_cast<std::size_t>(i)].index] *
                   entries[static_cast<std::size_t>(i)].value;
        }
        return acc;
    }

    std::vector<double> to_dense(std::size_t n) const {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < count; ++i) {
            out[entries[static_cast<std::size_t>(i)].index] =
                entries[static_cast<std::size_t>(i)].value;
        }
        return out;
    }
};

using WeightVector = std::vector<double>;

// Dense index layout of beta: [intruder indicator, intruder grid nodes,
// goal indicator, raw goal distance, goal grid nodes, constant].
struct FeatureLayout {
    bool intruder_enabled = true;
    bool goal_enabled = true;
    Grid intruder_grid;  // distance, bearing-from-intruder, relative heading
    Grid goal_grid;      // distance to goal, |bearing to goal|

    std::size_t intruder_indicator_ofs = 0;
    std::size_t intruder_grid_ofs = 0;
    std::size_t goal_indicator_ofs = 0;
    std::size_t goal_raw_dist_ofs = 0;
    std::size_t goal_grid_ofs = 0;
    std::size_t constant_ofs = 0;
    std::size_t n_beta = 0;
};

FeatureLayout make_feature_layout(const ScenarioConfig& cfg);

// Own pose relative to the intruder, the domain of the intruder grid.
struct IntruderRelState {
    double distance = 0.0;           // m
    double bearing_from_intruder = 0.0;  // rad, [-pi, pi)
    double relative_heading = 0.0;   // rad, [-pi, pi)
};

IntruderRelState intruder_rel_state(const VehicleState& own,
                                    const VehicleState& intruder);

// Feature sub-vectors, indexed per the layout. beta() concatenates them
// with the trailing constant; terminal states map to the zero vector.
SparseFeatures beta_intruder(const IntruderRelState& rel,
                             const FeatureLayout& layout,
                             const ScenarioConfig& cfg);
SparseFeatures beta_goal(const VehicleState& own, const FeatureLayout& layout,
                         const ScenarioConfig& cfg);

SparseFeatures beta(const EncounterState& s, const FeatureLayout& layout,
                    const ScenarioConfig& cfg);
SparseFeatures beta(const PostDecisionState& q, const FeatureLayout& layout,
                    const ScenarioConfig& cfg);

double value(const EncounterState& s, const WeightVector& theta,
             const FeatureLayout& layout, const ScenarioConfig& cfg);
double value(const PostDecisionState& q, const WeightVector& theta,
             const FeatureLayout& layout, const ScenarioConfig& cfg);

// Replace the intruder-relative coordinates by the nearest intruder-grid
// node and rebuild the intruder's absolute state, holding the own state
// fixed. Positions sampled this way carry one-hot grid weights.
EncounterState snap_to_grid(const EncounterState& s,
                            const FeatureLayout& layout);

// Absolute intruder state realizing the given relative coordinates for a
// fixed own state.
VehicleState intruder_from_rel(const VehicleState& own,
                               const IntruderRelState& rel);

}  // namespace sepopt
