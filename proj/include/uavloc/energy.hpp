#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace uavloc {

/// Rotary-wing airframe constants feeding the three propulsion power terms.
struct AirframeParams {
    double mass_kg = 5.0;
    double gravity_mps2 = 9.81;
    double air_density = 1.225;   // rho, kg/m^3
    double drag_area_m2 = 0.4;    // C_ds, drag coefficient times reference area
    double rotor_area_m2 = 0.25;  // A_d, rotor disc area
    double blade_power_w = 570.0; // k_o, blade-profile constant
    double tip_speed_mps = 100.0; // v_t, blade tip speed

    double weight_n() const { return mass_kg * gravity_mps2; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) {
                throw std::invalid_argument(std::string("airframe.") + name +
                                            ": must be > 0 (got " + std::to_string(v) + ")");
            }
        };
        positive(mass_kg, "mass_kg");
        positive(gravity_mps2, "gravity_mps2");
        positive(air_density, "air_density");
        positive(drag_area_m2, "drag_area_m2");
        positive(rotor_area_m2, "rotor_area_m2");
        positive(blade_power_w, "blade_power_w");
        positive(tip_speed_mps, "tip_speed_mps");
    }
};

/// Mean propeller induced velocity in forward flight at airspeed v.
inline double induced_velocity(double airspeed_mps, const AirframeParams& p) {
    if (!(airspeed_mps >= 0.0)) {
        throw std::invalid_argument("induced_velocity: airspeed must be >= 0 (got " +
                                    std::to_string(airspeed_mps) + ")");
    }
    const double v2 = airspeed_mps * airspeed_mps;
    const double disc_loading = p.weight_n() / (p.air_density * p.rotor_area_m2);
    return std::sqrt((-v2 + std::sqrt(v2 * v2 + disc_loading * disc_loading)) / 2.0);
}

struct PowerBreakdown {
    double induced_w = 0.0;
    double parasitic_w = 0.0;
    double blade_profile_w = 0.0;

    double total_w() const { return induced_w + parasitic_w + blade_profile_w; }
};

/// The three propulsion power terms at airspeed v.
inline PowerBreakdown forward_flight_power_components(double airspeed_mps,
                                                      const AirframeParams& p) {
    const double v = airspeed_mps;
    PowerBreakdown out;
    out.induced_w = p.weight_n() * induced_velocity(v, p);
    out.parasitic_w = 0.5 * p.air_density * v * v * v * p.drag_area_m2;
    out.blade_profile_w =
        p.blade_power_w * (1.0 + 3.0 * v * v / (p.tip_speed_mps * p.tip_speed_mps));
    return out;
}

/// Total propulsion power in forward flight, W.
inline double forward_flight_power(double airspeed_mps, const AirframeParams& p) {
    return forward_flight_power_components(airspeed_mps, p).total_w();
}

/// Hover power k_o + sqrt((mg)^3 / (2 rho A_d)), W. Equals the v = 0 limit of
/// forward flight.
inline double hover_power(const AirframeParams& p) {
    const double w = p.weight_n();
    return p.blade_power_w + std::sqrt(w * w * w / (2.0 * p.air_density * p.rotor_area_m2));
}

/// Airspeed minimizing forward_flight_power, found by golden-section search
/// on an expanding bracket, to 1e-3 m/s.
inline double optimal_cruise_speed(const AirframeParams& p) {
    auto power = [&](double v) { return forward_flight_power(v, p); };

    // bracket the minimum: the parasitic term guarantees eventual growth
    double hi = 1.0;
    while (power(hi * 2.0) < power(hi) && hi < 1.0e6) hi *= 2.0;
    hi *= 2.0;

    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = power(c), fd = power(d);
    while (b - a > 1.0e-3) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = power(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = power(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace uavloc
