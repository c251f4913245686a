#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uavloc/trajectory.hpp"

using namespace uavloc;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("waypoints of a square path") {
    Trajectory t;
    t.n_waypoints = 4;
    const std::vector<Vec3> wp = waypoints(t);
    REQUIRE(wp.size() == 4);
    CHECK(wp[0].x == Approx(120.0).margin(1e-9));
    CHECK(wp[0].y == Approx(0.0).margin(1e-9));
    CHECK(wp[1].x == Approx(0.0).margin(1e-9));
    CHECK(wp[1].y == Approx(120.0).margin(1e-9));
    CHECK(wp[2].x == Approx(-120.0).margin(1e-9));
    CHECK(wp[3].y == Approx(-120.0).margin(1e-9));
    for (const Vec3& w : wp) CHECK(w.z == Approx(200.0));
}

TEST_CASE("waypoints equidistant from the center") {
    for (int m : {3, 4, 7, 12}) {
        Trajectory t;
        t.n_waypoints = m;
        t.center = {31.0, -17.0};
        t.phase_rad = 0.4;
        for (const Vec3& w : waypoints(t)) {
            CHECK(std::hypot(w.x - t.center.x, w.y - t.center.y) ==
                  Approx(t.radius_m).margin(1e-9));
        }
    }
}

TEST_CASE("adjacent waypoint spacing equals the leg length") {
    Trajectory t;
    t.n_waypoints = 3;
    const std::vector<Vec3> wp = waypoints(t);
    const double l = leg_length(t);
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = wp[size_t(i)];
        const Vec3& b = wp[size_t((i + 1) % 3)];
        CHECK(std::hypot(a.x - b.x, a.y - b.y) == Approx(l).margin(1e-9));
    }
}

TEST_CASE("leg length closed form") {
    Trajectory t;
    t.n_waypoints = 3;
    CHECK(leg_length(t) == Approx(2.0 * 120.0 * std::sin(kPi / 3.0)).epsilon(1e-12));
    CHECK(leg_length(t) == Approx(207.846).margin(1e-3));
    t.n_waypoints = 4;
    CHECK(leg_length(t) == Approx(169.706).margin(1e-3));

    t.n_waypoints = 1000000;
    CHECK(leg_length(t) < 1e-2);
    CHECK(double(t.n_waypoints) * leg_length(t) ==
          Approx(2.0 * kPi * t.radius_m).epsilon(1e-9));
}

TEST_CASE("mission energy") {
    AirframeParams af;
    Trajectory t;
    t.cruise_speed_mps = 11.11;

    // direct composition of the hover and cruise terms
    const double p_h = hover_power(af);
    const double p_ff = forward_flight_power(t.cruise_speed_mps, af);
    const double l = 2.0 * t.radius_m * std::sin(kPi / 3.0);
    const double oracle = 3.0 * (5.0 * p_h + l / t.cruise_speed_mps * p_ff);
    CHECK(mission_energy(t, af) == Approx(oracle).epsilon(1e-12));
    CHECK(mission_energy(t, af) == Approx(84.4e3).margin(300.0));

    // no hover and a vanishing circle: no energy
    Trajectory idle = t;
    idle.hover_time_s = 0.0;
    idle.radius_m = 1e-9;
    CHECK(mission_energy(idle, af) < 1e-3);

    // doubling the hover time adds exactly M t_h P_h
    Trajectory longer = t;
    longer.hover_time_s = 10.0;
    CHECK(mission_energy(longer, af) - mission_energy(t, af) ==
          Approx(3.0 * 5.0 * p_h).epsilon(1e-12));
}

TEST_CASE("mission energy with a per-waypoint hover schedule") {
    AirframeParams af;
    Trajectory t;
    t.hover_schedule_s = {2.0, 5.0, 8.0};  // same total as uniform 5 s
    const double scheduled = mission_energy(t, af);
    t.hover_schedule_s.clear();
    CHECK(scheduled == Approx(mission_energy(t, af)).epsilon(1e-12));

    t.hover_schedule_s = {1.0, 2.0};  // wrong length
    CHECK_THROWS_WITH(mission_energy(t, af), ContainsSubstring("hover_schedule"));
}

TEST_CASE("mission energy monotone in t_h, R, M") {
    AirframeParams af;
    Trajectory t;
    double prev = mission_energy(t, af);
    for (double th : {6.0, 8.0, 15.0}) {
        Trajectory u = t;
        u.hover_time_s = th;
        const double e = mission_energy(u, af);
        CHECK(e > prev);
        prev = e;
    }
    prev = mission_energy(t, af);
    for (double r : {150.0, 200.0, 400.0}) {
        Trajectory u = t;
        u.radius_m = r;
        const double e = mission_energy(u, af);
        CHECK(e > prev);
        prev = e;
    }
    prev = mission_energy(t, af);
    for (int m : {4, 5, 8}) {
        Trajectory u = t;
        u.n_waypoints = m;
        const double e = mission_energy(u, af);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("mission energy is minimized at the max-range speed") {
    // the legs cost (l / v) P_ff(v), so the energy-optimal cruise speed is
    // the one minimizing P_ff(v) / v, not the power minimizer
    AirframeParams af;
    double v_range = 1.0;
    double best = forward_flight_power(1.0, af) / 1.0;
    for (double v = 1.0; v <= 40.0; v += 0.01) {
        const double per_meter = forward_flight_power(v, af) / v;
        if (per_meter < best) {
            best = per_meter;
            v_range = v;
        }
    }
    CHECK(v_range > optimal_cruise_speed(af));

    Trajectory t;
    t.cruise_speed_mps = v_range;
    const double at_range_speed = mission_energy(t, af);
    for (double v : {3.0, 8.0, 15.0, 25.0}) {
        Trajectory u = t;
        u.cruise_speed_mps = v;
        CHECK(mission_energy(u, af) >= at_range_speed);
    }
}

TEST_CASE("total flown ground distance") {
    Trajectory t;
    t.n_waypoints = 5;
    const std::vector<Vec3> wp = waypoints(t);
    double total = 0.0;
    for (int i = 0; i < t.n_waypoints; ++i) {
        const Vec3& a = wp[size_t(i)];
        const Vec3& b = wp[size_t((i + 1) % t.n_waypoints)];
        total += std::hypot(a.x - b.x, a.y - b.y);
    }
    CHECK(total == Approx(double(t.n_waypoints) * leg_length(t)).epsilon(1e-12));
}

TEST_CASE("elevation geometry to a node") {
    Trajectory t;

    const LinkGeometry under = elevation_to(t, 0, {120.0, 0.0});
    CHECK(under.range_m == Approx(0.0).margin(1e-9));
    CHECK(under.elevation_rad == Approx(kPi / 2.0));

    const LinkGeometry diag = elevation_to(t, 0, {120.0 - 200.0, 0.0});
    CHECK(diag.elevation_rad == Approx(kPi / 4.0).epsilon(1e-12));

    const LinkGeometry origin = elevation_to(t, 0, {0.0, 0.0});
    CHECK(origin.slant_m == Approx(std::sqrt(120.0 * 120.0 + 200.0 * 200.0)).epsilon(1e-12));
    CHECK(origin.slant_m == Approx(233.238).margin(1e-3));

    CHECK_THROWS_AS(elevation_to(t, 3, {0.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(elevation_to(t, -1, {0.0, 0.0}), std::out_of_range);
}

TEST_CASE("trajectory validation") {
    Trajectory t;
    t.n_waypoints = 2;
    CHECK_THROWS_WITH(t.validate(), ContainsSubstring("waypoints"));
    t = Trajectory{};
    t.radius_m = 0.0;
    CHECK_THROWS_WITH(t.validate(), ContainsSubstring("radius_m"));
}
