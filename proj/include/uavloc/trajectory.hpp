#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavloc/channel.hpp"
#include "uavloc/energy.hpp"
#include "uavloc/geometry.hpp"

namespace uavloc {

/// Circular waypoint path: M waypoints equally spaced on a circle of radius R
/// at altitude h, flown as a closed tour with a hover at every waypoint. The
/// first waypoint doubles as the home waypoint.
struct Trajectory {
    Vec2 center{0.0, 0.0};
    double radius_m = 120.0;
    double altitude_m = 200.0;
    int n_waypoints = 3;
    double hover_time_s = 5.0;
    double cruise_speed_mps = 40.0 / 3.6;  // 40 km/h
    double phase_rad = 0.0;                // angular offset of the first waypoint

    // Optional per-waypoint hover times; empty means hover_time_s everywhere.
    std::vector<double> hover_schedule_s;

    void validate() const {
        if (n_waypoints < 3) {
            throw std::invalid_argument("trajectory.waypoints: must be >= 3 (got " +
                                        std::to_string(n_waypoints) + ")");
        }
        if (!(radius_m > 0.0)) {
            throw std::invalid_argument("trajectory.radius_m: must be > 0 (got " +
                                        std::to_string(radius_m) + ")");
        }
        if (!(altitude_m > 0.0)) {
            throw std::invalid_argument("trajectory.altitude_m: must be > 0 (got " +
                                        std::to_string(altitude_m) + ")");
        }
        if (!(hover_time_s >= 0.0)) {
            throw std::invalid_argument("trajectory.hover_time_s: must be >= 0 (got " +
                                        std::to_string(hover_time_s) + ")");
        }
        if (!(cruise_speed_mps > 0.0)) {
            throw std::invalid_argument("trajectory.cruise_speed_mps: must be > 0 (got " +
                                        std::to_string(cruise_speed_mps) + ")");
        }
        if (!hover_schedule_s.empty() &&
            hover_schedule_s.size() != static_cast<size_t>(n_waypoints)) {
            throw std::invalid_argument(
                "trajectory.hover_schedule_s: must be empty or hold one entry per waypoint");
        }
    }

    double hover_time_at(int waypoint_index) const {
        return hover_schedule_s.empty() ? hover_time_s
                                        : hover_schedule_s[size_t(waypoint_index)];
    }

    double angular_step_rad() const { return 2.0 * kPi / double(n_waypoints); }

    Vec2 ground_waypoint(int k) const {
        const double ang = phase_rad + double(k) * angular_step_rad();
        return {center.x + radius_m * std::cos(ang), center.y + radius_m * std::sin(ang)};
    }
};

/// The M waypoints in tour order; the flown path closes back on the first.
inline std::vector<Vec3> waypoints(const Trajectory& t) {
    t.validate();
    std::vector<Vec3> out;
    out.reserve(size_t(t.n_waypoints));
    for (int k = 0; k < t.n_waypoints; ++k) {
        const Vec2 g = t.ground_waypoint(k);
        out.push_back({g.x, g.y, t.altitude_m});
    }
    return out;
}

/// Distance between adjacent waypoints, l_M = 2 R sin(pi / M).
inline double leg_length(const Trajectory& t) {
    t.validate();
    return 2.0 * t.radius_m * std::sin(kPi / double(t.n_waypoints));
}

/// Total mission energy: hover at every waypoint plus M cruise legs, J.
inline double mission_energy(const Trajectory& t, const AirframeParams& af) {
    t.validate();
    const double p_hover = hover_power(af);
    const double p_cruise = forward_flight_power(t.cruise_speed_mps, af);
    const double leg_time = leg_length(t) / t.cruise_speed_mps;
    double hover_energy = 0.0;
    for (int k = 0; k < t.n_waypoints; ++k) hover_energy += t.hover_time_at(k) * p_hover;
    return hover_energy + double(t.n_waypoints) * leg_time * p_cruise;
}

/// Link geometry from the waypoint's ground projection to a ground node.
inline LinkGeometry elevation_to(const Trajectory& t, int waypoint_index, const Vec2& node) {
    t.validate();
    if (waypoint_index < 0 || waypoint_index >= t.n_waypoints) {
        throw std::out_of_range("elevation_to: waypoint index " +
                                std::to_string(waypoint_index) + " out of range [0, " +
                                std::to_string(t.n_waypoints) + ")");
    }
    const double r = distance(t.ground_waypoint(waypoint_index), node);
    return LinkGeometry::from_horizontal(r, t.altitude_m);
}

}  // namespace uavloc
