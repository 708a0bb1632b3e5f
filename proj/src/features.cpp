#include "sepopt/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sepopt/errors.hpp"

namespace sepopt {

GridAxis uniform_axis(std::string name, double lo, double hi, int count) {
    GridAxis axis;
    axis.name = std::move(name);
    axis.nodes.resize(static_cast<std::size_t>(count));
    const double h = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        axis.nodes[static_cast<std::size_t>(i)] = lo + h * i;
    }
    axis.nodes.back() = hi;
    return axis;
}

GridAxis periodic_angle_axis(std::string name, int count) {
    GridAxis axis;
    axis.name = std::move(name);
    axis.nodes.resize(static_cast<std::size_t>(count));
    const double h = 2.0 * kPi / count;
    for (int i = 0; i < count; ++i) {
        axis.nodes[static_cast<std::size_t>(i)] = -kPi + h * i;
    }
    axis.periodic = true;
    axis.period = 2.0 * kPi;
    return axis;
}

namespace {

double snap_frac(double f) {
    if (f < kNodeSnapEps) return 0.0;
    if (f > 1.0 - kNodeSnapEps) return 1.0;
    return f;
}

}  // namespace

AxisCell locate_on_axis(const GridAxis& axis, double p) {
    const int n = static_cast<int>(axis.nodes.size());
    AxisCell cell;
    if (axis.periodic) {
        const double lo = axis.nodes.front();
        p = p - axis.period * std::floor((p - lo) / axis.period);
        if (p < lo) p = lo;  // rounding guard
        if (p >= axis.nodes.back()) {
            // seam cell between last and first node
            const double gap = lo + axis.period - axis.nodes.back();
            cell.lo = n - 1;
            cell.hi = 0;
            cell.frac = snap_frac((p - axis.nodes.back()) / gap);
            return cell;
        }
    } else {
        p = std::clamp(p, axis.nodes.front(), axis.nodes.back());
    }
    auto it = std::upper_bound(axis.nodes.begin(), axis.nodes.end(), p);
    int lo = static_cast<int>(it - axis.nodes.begin()) - 1;
    lo = std::clamp(lo, 0, n - 2);
    cell.lo = lo;
    cell.hi = lo + 1;
    cell.frac = snap_frac((p - axis.nodes[static_cast<std::size_t>(lo)]) /
                          (axis.nodes[static_cast<std::size_t>(lo + 1)] -
                           axis.nodes[static_cast<std::size_t>(lo)]));
    return cell;
}

int nearest_on_axis(const GridAxis& axis, double p) {
    const AxisCell cell = locate_on_axis(axis, p);
    return cell.frac < 0.5 ? cell.lo : cell.hi;
}

std::size_t Grid::node_count() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.nodes.size();
    return n;
}

Grid::WeightList Grid::weights(const double* point) const {
    const int dims = static_cast<int>(axes.size());
    std::array<AxisCell, kMaxAxes> cells{};
    for (int d = 0; d < dims; ++d) {
        cells[static_cast<std::size_t>(d)] =
            locate_on_axis(axes[static_cast<std::size_t>(d)], point[d]);
    }

    WeightList out;
    out.push(0, 1.0);
    for (int d = 0; d < dims; ++d) {
        const auto& cell = cells[static_cast<std::size_t>(d)];
        const auto n = static_cast<std::uint32_t>(
            axes[static_cast<std::size_t>(d)].nodes.size());
        WeightList next;
        for (int i = 0; i < out.count; ++i) {
            const auto& w = out.items[static_cast<std::size_t>(i)];
            if (cell.frac < 1.0) {
                next.push(w.index * n + static_cast<std::uint32_t>(cell.lo),
                          w.value * (1.0 - cell.frac));
            }
            if (cell.frac > 0.0) {
                next.push(w.index * n + static_cast<std::uint32_t>(cell.hi),
                          w.value * cell.frac);
            }
        }
        out = next;
    }
    return out;
}

std::uint32_t Grid::nearest_node(const double* point) const {
    std::uint32_t flat = 0;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        flat = flat * static_cast<std::uint32_t>(axes[d].nodes.size()) +
               static_cast<std::uint32_t>(
                   nearest_on_axis(axes[d], point[d]));
    }
    return flat;
}

void Grid::node_coords(std::uint32_t flat, double* out) const {
    for (std::size_t d = axes.size(); d-- > 0;) {
        const auto n = static_cast<std::uint32_t>(axes[d].nodes.size());
        out[d] = axes[d].nodes[flat % n];
        flat /= n;
    }
}

bool Grid::operator==(const Grid& other) const {
    if (axes.size() != other.axes.size()) return false;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        if (axes[d].nodes != other.axes[d].nodes ||
            axes[d].periodic != other.axes[d].periodic) {
            return false;
        }
    }
    return true;
}

FeatureLayout make_feature_layout(const ScenarioConfig& cfg) {
    const FeatureConfig& fc = cfg.features;
    FeatureLayout layout;
    layout.intruder_enabled = fc.intruder_group;
    layout.goal_enabled = fc.goal_group;

    std::size_t ofs = 0;
    if (fc.intruder_group) {
        layout.intruder_grid.axes = {
            uniform_axis("intruder_distance", fc.intruder_dist_min,
                         fc.intruder_dist_max, fc.intruder_dist_nodes),
            periodic_angle_axis("bearing_from_intruder",
                                fc.intruder_bearing_nodes),
            periodic_angle_axis("relative_heading", fc.intruder_heading_nodes),
        };
        layout.intruder_indicator_ofs = ofs++;
        layout.intruder_grid_ofs = ofs;
        ofs += layout.intruder_grid.node_count();
    }
    if (fc.goal_group) {
        layout.goal_grid.axes = {
            uniform_axis("goal_distance", 0.0, fc.goal_dist_max,
                         fc.goal_dist_nodes),
            uniform_axis("abs_bearing_to_goal", 0.0, kPi,
                         fc.goal_bearing_nodes),
        };
        layout.goal_indicator_ofs = ofs++;
        layout.goal_raw_dist_ofs = ofs++;
        layout.goal_grid_ofs = ofs;
        ofs += layout.goal_grid.node_count();
    }
    layout.constant_ofs = ofs++;
    layout.n_beta = ofs;
    return layout;
}

IntruderRelState intruder_rel_state(const VehicleState& own,
                                    const VehicleState& intruder) {
    const double dx = own.x - intruder.x;
    const double dy = own.y - intruder.y;
    IntruderRelState rel;
    rel.distance = std::sqrt(dx * dx + dy * dy);
    // the bearing is undefined at zero separation; pin it to 0 so states
    // reconstructed from a zero-distance grid node stay on the grid
    rel.bearing_from_intruder =
        rel.distance == 0.0
            ? 0.0
            : wrap_angle(std::atan2(dy, dx) - intruder.psi);
    rel.relative_heading = wrap_angle(own.psi - intruder.psi);
    return rel;
}

VehicleState intruder_from_rel(const VehicleState& own,
                               const IntruderRelState& rel) {
    VehicleState intruder;
    intruder.psi = wrap_angle(own.psi - rel.relative_heading);
    const double alpha = intruder.psi + rel.bearing_from_intruder;
    intruder.x = own.x - rel.distance * std::cos(alpha);
    intruder.y = own.y - rel.distance * std::sin(alpha);
    return intruder;
}

SparseFeatures beta_intruder(const IntruderRelState& rel,
                             const FeatureLayout& layout,
                             const ScenarioConfig& cfg) {
    SparseFeatures out;
    if (!layout.intruder_enabled) return out;
    if (rel.distance <= cfg.d_nmac) {
        out.push(static_cast<std::uint32_t>(layout.intruder_indicator_ofs),
                 1.0);
    }
    const double point[3] = {rel.distance, rel.bearing_from_intruder,
                             rel.relative_heading};
    const auto weights = layout.intruder_grid.weights(point);
    for (int i = 0; i < weights.count; ++i) {
        const auto& w = weights.items[static_cast<std::size_t>(i)];
        out.push(static_cast<std::uint32_t>(layout.intruder_grid_ofs) +
                     w.index,
                 w.value);
    }
    return out;
}

SparseFeatures beta_goal(const VehicleState& own, const FeatureLayout& layout,
                         const ScenarioConfig& cfg) {
    SparseFeatures out;
    if (!layout.goal_enabled) return out;
    const double dx = cfg.goal_x - own.x;
    const double dy = cfg.goal_y - own.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (in_goal(own, cfg)) {
        out.push(static_cast<std::uint32_t>(layout.goal_indicator_ofs), 1.0);
    }
    out.push(static_cast<std::uint32_t>(layout.goal_raw_dist_ofs), dist);
    const double point[2] = {
        dist, std::abs(wrap_angle(std::atan2(dy, dx) - own.psi))};
    const auto weights = layout.goal_grid.weights(point);
    for (int i = 0; i < weights.count; ++i) {
        const auto& w = weights.items[static_cast<std::size_t>(i)];
        out.push(static_cast<std::uint32_t>(layout.goal_grid_ofs) + w.index,
                 w.value);
    }
    return out;
}

namespace {

SparseFeatures beta_components(const VehicleState& own,
                               const VehicleState& intruder,
                               const FeatureLayout& layout,
                               const ScenarioConfig& cfg) {
    SparseFeatures out;
    if (layout.intruder_enabled) {
        const SparseFeatures fi =
            beta_intruder(intruder_rel_state(own, intruder), layout, cfg);
        for (int i = 0; i < fi.count; ++i) {
            out.push(fi.entries[static_cast<std::size_t>(i)].index,
                     fi.entries[static_cast<std::size_t>(i)].value);
        }
    }
    if (layout.goal_enabled) {
        const SparseFeatures fg = beta_goal(own, layout, cfg);
        for (int i = 0; i < fg.count; ++i) {
            out.push(fg.entries[static_cast<std::size_t>(i)].index,
                     fg.entries[static_cast<std::size_t>(i)].value);
        }
    }
    out.push(static_cast<std::uint32_t>(layout.constant_ofs), 1.0);
    return out;
}

}  // namespace

SparseFeatures beta(const EncounterState& s, const FeatureLayout& layout,
                    const ScenarioConfig& cfg) {
    if (s.terminal) return {};
    return beta_components(s.own, s.intruder, layout, cfg);
}

SparseFeatures beta(const PostDecisionState& q, const FeatureLayout& layout,
                    const ScenarioConfig& cfg) {
    if (q.terminal) return {};
    return beta_components(q.own_next, q.intruder_now, layout, cfg);
}

namespace {

void check_theta(const WeightVector& theta, const FeatureLayout& layout) {
    if (theta.size() != layout.n_beta) {
        throw ConfigError("weight vector length " +
                          std::to_string(theta.size()) +
                          " does not match feature count " +
                          std::to_string(layout.n_beta));
    }
}

}  // namespace

double value(const EncounterState& s, const WeightVector& theta,
             const FeatureLayout& layout, const ScenarioConfig& cfg) {
    check_theta(theta, layout);
    return beta(s, layout, cfg).dot(theta);
}

double value(const PostDecisionState& q, const WeightVector& theta,
             const FeatureLayout& layout, const ScenarioConfig& cfg) {
    check_theta(theta, layout);
    return beta(q, layout, cfg).dot(theta);
}

EncounterState snap_to_grid(const EncounterState& s,
                            const FeatureLayout& layout) {
    if (s.terminal) {
        throw std::invalid_argument("snap_to_grid: state is terminal");
    }
    if (!layout.intruder_enabled) return s;
    const IntruderRelState rel = intruder_rel_state(s.own, s.intruder);
    const double point[3] = {rel.distance, rel.bearing_from_intruder,
                             rel.relative_heading};
    const std::uint32_t node = layout.intruder_grid.nearest_node(point);
    double coords[3];
    layout.intruder_grid.node_coords(node, coords);

    // Already sitting on the node: keep the state bit-identical.
    if (std::abs(coords[0] - rel.distance) < 1e-9 &&
        std::abs(wrap_angle(coords[1] - rel.bearing_from_intruder)) < 1e-9 &&
        std::abs(wrap_angle(coords[2] - rel.relative_heading)) < 1e-9) {
        return s;
    }

    EncounterState out = s;
    out.intruder = intruder_from_rel(
        s.own, IntruderRelState{coords[0], coords[1], coords[2]});
    return out;
}

}  // namespace sepopt
