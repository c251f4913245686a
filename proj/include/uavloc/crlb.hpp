#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavloc/channel.hpp"
#include "uavloc/geometry.hpp"
#include "uavloc/trajectory.hpp"

namespace uavloc {

inline constexpr double kLn10Over20 = 0.11512925464970229;  // ln(10)/20

/// Closed-form CRLB of the RSS distance estimator for one link class:
/// (d ln10 / 20) a_j exp(-b_j theta), meters.
inline double crlb_sigma(double slant_m, double theta_rad, LinkClass c,
                         const ChannelParams& p) {
    if (!(slant_m > 0.0)) {
        throw std::invalid_argument("crlb_sigma: distance must be > 0 (got " +
                                    std::to_string(slant_m) + ")");
    }
    return slant_m * kLn10Over20 * shadowing_sigma(theta_rad, c, p);
}

namespace detail {

/// Quadratic combination with the squared class-probability weights:
/// sqrt(p^2 s_los^2 + (1-p)^2 s_nlos^2).
inline double squared_weight_rms(double p_los_val, double s_los, double s_nlos) {
    const double q = 1.0 - p_los_val;
    return std::sqrt(p_los_val * p_los_val * s_los * s_los + q * q * s_nlos * s_nlos);
}

}  // namespace detail

/// Class-averaged CRLB, combining the two conditional bounds with squared
/// LoS/NLoS probability weights.
inline double crlb_avg(double slant_m, double theta_rad, const ChannelParams& p) {
    const double pl = p_los(theta_rad, p);
    return detail::squared_weight_rms(pl, crlb_sigma(slant_m, theta_rad, LinkClass::kLos, p),
                                      crlb_sigma(slant_m, theta_rad, LinkClass::kNlos, p));
}

/// Numerical CRLB from the received-power density: the Fisher information
/// E[(d/dd ln f(w|d,theta))^2] is evaluated by trapezoid quadrature over w
/// with a central-difference score, and the bound is its inverse square root.
/// Exists to validate the closed form and shares no algebra with it.
inline double fisher_crlb_oracle(double slant_m, double theta_rad, LinkClass c,
                                 const ChannelParams& p, std::size_t quad_points = 200001,
                                 double rel_step = 1e-4) {
    if (!(slant_m > 0.0)) {
        throw std::invalid_argument("fisher_crlb_oracle: distance must be > 0");
    }
    if (quad_points < 3) {
        throw std::invalid_argument("fisher_crlb_oracle: need at least 3 quadrature points");
    }
    const double sigma = shadowing_sigma(theta_rad, c, p);
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const double log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
    auto mean_power = [&](double d) { return mean_received_power(d, c, p); };
    auto log_pdf = [&](double w, double d) {
        const double z = w - mean_power(d);
        return log_norm - z * z * inv_two_sigma2;
    };

    const double m = mean_power(slant_m);
    const double half_width = 12.0 * sigma;
    const double lo = m - half_width;
    const double step = 2.0 * half_width / double(quad_points - 1);
    const double dd = slant_m * rel_step;

    double info = 0.0;
    for (std::size_t i = 0; i < quad_points; ++i) {
        const double w = lo + double(i) * step;
        const double score =
            (log_pdf(w, slant_m + dd) - log_pdf(w, slant_m - dd)) / (2.0 * dd);
        const double z = w - m;
        const double pdf = std::exp(log_norm - z * z * inv_two_sigma2);
        const double weight = (i == 0 || i == quad_points - 1) ? 0.5 : 1.0;
        info += weight * score * score * pdf;
    }
    info *= step;
    return 1.0 / std::sqrt(info);
}

namespace detail {

/// Exact standard deviation of d_hat = d 10^(X/20), X ~ N(0, sigma_db^2).
inline double lognormal_range_std(double slant_m, double sigma_db) {
    const double t2 = kLn10Over20 * kLn10Over20 * sigma_db * sigma_db;
    return slant_m * std::sqrt(std::exp(2.0 * t2) - std::exp(t2));
}

}  // namespace detail

/// Standard deviation of the distance estimator for one class after
/// averaging n RSS samples.
inline double estimator_std(double slant_m, double theta_rad, LinkClass c, int n_samples,
                            const ChannelParams& p) {
    if (!(slant_m > 0.0)) {
        throw std::invalid_argument("estimator_std: distance must be > 0");
    }
    if (n_samples < 1) {
        throw std::invalid_argument("estimator_std: n_samples must be >= 1");
    }
    const double sigma = shadowing_sigma(theta_rad, c, p);
    return detail::lognormal_range_std(slant_m, sigma / std::sqrt(double(n_samples)));
}

/// Class mixture of the estimator deviation, weighting the conditional
/// variances by the LoS/NLoS probabilities:
/// sqrt(P std_los^2 + (1-P) std_nlos^2).
inline double mixture_estimator_std(double slant_m, double theta_rad, int n_samples,
                                    const ChannelParams& p) {
    const double pl = p_los(theta_rad, p);
    const double sl = estimator_std(slant_m, theta_rad, LinkClass::kLos, n_samples, p);
    const double sn = estimator_std(slant_m, theta_rad, LinkClass::kNlos, n_samples, p);
    return std::sqrt(pl * sl * sl + (1.0 - pl) * sn * sn);
}

struct CoverageSpec {
    double delta = 2.0;         // localization coverage factor
    double resolution_m = 0.0;  // grid step for numeric areas; 0 picks min(r)/500
    int n_samples = 1;          // RSS samples backing the estimator deviation

    void validate() const {
        if (!(delta > 0.0)) {
            throw std::invalid_argument("coverage.delta: must be > 0 (got " +
                                        std::to_string(delta) + ")");
        }
        if (!(resolution_m >= 0.0)) {
            throw std::invalid_argument("coverage.resolution_m: must be >= 0 (got " +
                                        std::to_string(resolution_m) + ")");
        }
        if (n_samples < 1) {
            throw std::invalid_argument("coverage.n_samples: must be >= 1 (got " +
                                        std::to_string(n_samples) + ")");
        }
    }
};

struct CoverageRadius {
    double radius_m = 0.0;
    bool unbounded = false;  // condition never failed up to the 100h bracket cap
};

/// Largest ground range around the nadir within which the estimator deviation
/// stays below delta times the averaged CRLB. Found by an ascending scan for
/// the first violation over [0, 100h], refined by bisection to 0.1 m.
inline CoverageRadius coverage_radius(double altitude_m, const CoverageSpec& spec,
                                      const ChannelParams& p) {
    if (!(altitude_m > 0.0)) {
        throw std::invalid_argument("coverage_radius: altitude must be > 0");
    }
    spec.validate();
    auto within = [&](double r) {
        const double d = std::hypot(altitude_m, r);
        const double theta = std::atan2(altitude_m, r);
        return mixture_estimator_std(d, theta, spec.n_samples, p) <=
               spec.delta * crlb_avg(d, theta, p);
    };
    if (!within(0.0)) return {0.0, false};

    const double cap = 100.0 * altitude_m;
    const double scan_step = altitude_m / 200.0;
    double last_ok = 0.0;
    double first_bad = -1.0;
    for (double r = scan_step; r <= cap; r += scan_step) {
        if (!within(r)) {
            first_bad = r;
            break;
        }
        last_ok = r;
    }
    if (first_bad < 0.0) return {cap, true};

    double lo = last_ok, hi = first_bad;
    while (hi - lo > 0.1) {
        const double mid = 0.5 * (lo + hi);
        if (within(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

/// Closed-form area of the intersection of three identical circles of radius
/// r_c whose centers sit at mutual distance l. Returns 0 when the circles do
/// not share a common region (l > sqrt(3) r_c).
inline double coverage_area_three(double r_c, double l) {
    if (!(r_c > 0.0)) {
        throw std::invalid_argument("coverage_area_three: radius must be > 0");
    }
    if (!(l >= 0.0)) {
        throw std::invalid_argument("coverage_area_three: center distance must be >= 0");
    }
    const double under = 3.0 * r_c * r_c - 0.75 * l * l;
    if (under < 0.0) return 0.0;
    const double c2 = 3.0 * r_c * r_c - 0.5 * l * l - l * std::sqrt(under);
    if (c2 <= 0.0) return 0.0;
    const double c = std::sqrt(c2);
    const double half_ratio = std::min(1.0, c / (2.0 * r_c));
    const double lens = r_c * r_c * std::asin(half_ratio) -
                        (c / 4.0) * std::sqrt(std::max(0.0, 4.0 * r_c * r_c - c2));
    return std::sqrt(3.0) / 4.0 * c2 + 3.0 * lens;
}

/// Area of the intersection of arbitrary disks by counting grid cells over
/// the bounding box of the smallest disk. Deterministic for a given input.
inline double coverage_area_numeric(std::span<const Vec2> centers,
                                    std::span<const double> radii, double resolution_m) {
    if (centers.empty() || centers.size() != radii.size()) {
        throw std::invalid_argument("coverage_area_numeric: need equal-length nonempty lists");
    }
    if (!(resolution_m > 0.0)) {
        throw std::invalid_argument("coverage_area_numeric: resolution must be > 0");
    }
    size_t smallest = 0;
    for (size_t i = 1; i < radii.size(); ++i) {
        if (radii[i] < radii[smallest]) smallest = i;
    }
    const double r = radii[smallest];
    if (!(r > 0.0)) return 0.0;
    const Vec2 c = centers[smallest];
    const long n = std::lround(std::ceil(2.0 * r / resolution_m));
    long inside = 0;
    for (long iy = 0; iy < n; ++iy) {
        const double y = c.y - r + (double(iy) + 0.5) * resolution_m;
        for (long ix = 0; ix < n; ++ix) {
            const double x = c.x - r + (double(ix) + 0.5) * resolution_m;
            bool in_all = true;
            for (size_t k = 0; k < centers.size(); ++k) {
                const double dx = x - centers[k].x;
                const double dy = y - centers[k].y;
                if (dx * dx + dy * dy > radii[k] * radii[k]) {
                    in_all = false;
                    break;
                }
            }
            inside += in_all ? 1 : 0;
        }
    }
    return double(inside) * resolution_m * resolution_m;
}

enum class CoverageMethod { kClosedFormThree, kNumeric };

struct CoverageResult {
    std::vector<double> per_waypoint_radius_m;
    double area_m2 = 0.0;
    CoverageMethod method = CoverageMethod::kNumeric;
    bool unbounded = false;
};

/// Coverage radius at every waypoint (identical by symmetry) and the area of
/// the intersection of the waypoint disks: closed form for three waypoints,
/// grid integration otherwise.
inline CoverageResult localization_coverage(const Trajectory& t, const CoverageSpec& spec,
                                            const ChannelParams& p) {
    t.validate();
    const CoverageRadius rc = coverage_radius(t.altitude_m, spec, p);
    CoverageResult out;
    out.per_waypoint_radius_m.assign(size_t(t.n_waypoints), rc.radius_m);
    out.unbounded = rc.unbounded;
    if (rc.radius_m <= 0.0) {
        out.method = CoverageMethod::kNumeric;
        out.area_m2 = 0.0;
        return out;
    }
    if (t.n_waypoints == 3) {
        out.method = CoverageMethod::kClosedFormThree;
        out.area_m2 = coverage_area_three(rc.radius_m, leg_length(t));
        return out;
    }
    out.method = CoverageMethod::kNumeric;
    std::vector<Vec2> centers;
    centers.reserve(size_t(t.n_waypoints));
    for (int k = 0; k < t.n_waypoints; ++k) centers.push_back(t.ground_waypoint(k));
    const std::vector<double> radii(size_t(t.n_waypoints), rc.radius_m);
    const double res = spec.resolution_m > 0.0 ? spec.resolution_m : rc.radius_m / 500.0;
    out.area_m2 = coverage_area_numeric(centers, radii, res);
    return out;
}

}  // namespace uavloc
