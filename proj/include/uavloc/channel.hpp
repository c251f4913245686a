#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "uavloc/geometry.hpp"

namespace uavloc {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

enum class LinkClass { kLos, kNlos };

/// Air-to-ground propagation constants. Shadowing scale and LoS probability
/// are functions of the elevation angle, which is in RADIANS everywhere in
/// this library; the default constants only produce sensible curves under
/// that convention.
struct ChannelParams {
    double frequency_hz = 2.0e9;  // carrier frequency f

    // LoS-probability constants (a_o dimensionless, b_o per radian)
    double a_o = 47.0;
    double b_o = 20.0;

    // shadowing scale sigma_j(theta) = a_j * exp(-b_j * theta), dB
    double a_los = 10.0;
    double b_los = 2.0;
    double a_nlos = 30.0;
    double b_nlos = 1.7;

    // mean excess path loss mu_j, dB
    double mu_los_db = 1.0;
    double mu_nlos_db = 20.0;

    // link budget constant C (transmit power + RSS transduction), dBm.
    // Cancels out of distance estimation when known at the estimator.
    double c_offset_dbm = 20.0;

    double mu_db(LinkClass c) const { return c == LinkClass::kLos ? mu_los_db : mu_nlos_db; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) {
                throw std::invalid_argument(std::string("channel.") + name +
                                            ": must be > 0 (got " + std::to_string(v) + ")");
            }
        };
        auto non_negative = [](double v, const char* name) {
            if (!(v >= 0.0)) {
                throw std::invalid_argument(std::string("channel.") + name +
                                            ": must be >= 0 (got " + std::to_string(v) + ")");
            }
        };
        positive(frequency_hz, "frequency_hz");
        positive(a_o, "a_o");
        positive(a_los, "a_los");
        positive(a_nlos, "a_nlos");
        non_negative(b_o, "b_o");
        non_negative(b_los, "b_los");
        non_negative(b_nlos, "b_nlos");
        if (!(a_nlos > a_los)) {
            throw std::invalid_argument("channel.a_nlos: must exceed a_los (got " +
                                        std::to_string(a_nlos) + " vs " + std::to_string(a_los) +
                                        ")");
        }
    }
};

/// UAV-to-node link geometry: horizontal range r, altitude h, slant distance
/// d = sqrt(h^2 + r^2) and elevation angle theta = atan2(h, r).
struct LinkGeometry {
    double range_m = 0.0;
    double altitude_m = 0.0;
    double slant_m = 0.0;
    double elevation_rad = 0.0;

    static LinkGeometry from_horizontal(double range_m, double altitude_m) {
        if (!(altitude_m > 0.0)) {
            throw std::invalid_argument("LinkGeometry: altitude must be > 0 (got " +
                                        std::to_string(altitude_m) + ")");
        }
        if (!(range_m >= 0.0)) {
            throw std::invalid_argument("LinkGeometry: range must be >= 0 (got " +
                                        std::to_string(range_m) + ")");
        }
        LinkGeometry g;
        g.range_m = range_m;
        g.altitude_m = altitude_m;
        g.slant_m = std::hypot(altitude_m, range_m);
        g.elevation_rad = std::atan2(altitude_m, range_m);
        return g;
    }
};

namespace detail {

inline void check_elevation(double theta_rad) {
    if (!(theta_rad >= 0.0 && theta_rad <= kPi / 2.0)) {
        throw std::domain_error("elevation angle must lie in [0, pi/2] rad (got " +
                                std::to_string(theta_rad) + ")");
    }
}

}  // namespace detail

/// Free-space constant K = 20 log10(4 pi f / c), dB.
inline double free_space_constant(const ChannelParams& p) {
    if (!(p.frequency_hz > 0.0)) {
        throw std::invalid_argument("free_space_constant: frequency must be > 0");
    }
    return 20.0 * std::log10(4.0 * kPi * p.frequency_hz / kSpeedOfLight);
}

/// Shadowing scale sigma_j(theta) = a_j exp(-b_j theta), dB.
inline double shadowing_sigma(double theta_rad, LinkClass c, const ChannelParams& p) {
    detail::check_elevation(theta_rad);
    const double a = (c == LinkClass::kLos) ? p.a_los : p.a_nlos;
    const double b = (c == LinkClass::kLos) ? p.b_los : p.b_nlos;
    return a * std::exp(-b * theta_rad);
}

/// Probability of a LoS link at elevation theta.
inline double p_los(double theta_rad, const ChannelParams& p) {
    detail::check_elevation(theta_rad);
    return 1.0 / (1.0 + p.a_o * std::exp(-p.b_o * theta_rad));
}

inline double p_nlos(double theta_rad, const ChannelParams& p) {
    return 1.0 - p_los(theta_rad, p);
}

/// Mean path loss 20 log10(d) + K + mu_j, dB (the shadowing term replaced by
/// its mean).
inline double mean_path_loss(double slant_m, LinkClass c, const ChannelParams& p) {
    if (!(slant_m > 0.0)) {
        throw std::invalid_argument("mean_path_loss: distance must be > 0 (got " +
                                    std::to_string(slant_m) + ")");
    }
    return 20.0 * std::log10(slant_m) + free_space_constant(p) + p.mu_db(c);
}

/// Noiseless time-averaged received power C - 20 log10(d) - K - mu_j, dBm.
inline double mean_received_power(double slant_m, LinkClass c, const ChannelParams& p) {
    return p.c_offset_dbm - mean_path_loss(slant_m, c, p);
}

enum class RssSampling {
    kAggregated,  // one normal draw with variance sigma^2 / n
    kPerSample,   // n independent draws, arithmetic mean
};

namespace detail {

/// Mean of n received-power samples around mean_dbm with per-sample shadowing
/// scale sigma_db. Both sampling modes are statistically identical.
inline double sample_mean_rss(double mean_dbm, double sigma_db, int n_samples,
                              std::mt19937_64& rng, RssSampling mode) {
    if (n_samples < 1) {
        throw std::invalid_argument("sample_rss: n_samples must be >= 1 (got " +
                                    std::to_string(n_samples) + ")");
    }
    if (!(sigma_db > 0.0)) return mean_dbm;  // degenerate distribution
    if (mode == RssSampling::kAggregated) {
        std::normal_distribution<double> dist(0.0, sigma_db / std::sqrt(double(n_samples)));
        return mean_dbm - dist(rng);
    }
    std::normal_distribution<double> dist(0.0, sigma_db);
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) acc += mean_dbm - dist(rng);
    return acc / double(n_samples);
}

}  // namespace detail

/// Time-averaged RSS over n_samples shadowing realizations, dBm.
inline double sample_rss(const LinkGeometry& link, LinkClass c, int n_samples,
                         std::mt19937_64& rng, const ChannelParams& p,
                         RssSampling mode = RssSampling::kAggregated) {
    const double mean = mean_received_power(link.slant_m, c, p);
    const double sigma = shadowing_sigma(link.elevation_rad, c, p);
    return detail::sample_mean_rss(mean, sigma, n_samples, rng, mode);
}

}  // namespace uavloc
