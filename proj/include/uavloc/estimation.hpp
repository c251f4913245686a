#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavloc/channel.hpp"
#include "uavloc/geometry.hpp"

namespace uavloc {

/// One averaged RSS reading taken at a waypoint, tagged with the link class
/// the estimator assumes when inverting the path loss model.
struct RangeObservation {
    int waypoint_index = 0;
    Vec2 anchor_xy{0.0, 0.0};  // waypoint ground projection
    double rss_avg_dbm = 0.0;
    LinkClass assumed_class = LinkClass::kLos;
    int n_samples = 1;
};

struct RangeEstimate {
    double slant_m = 0.0;   // d_hat
    double ground_m = 0.0;  // r_hat = sqrt(max(0, d_hat^2 - h^2))
};

/// Invert the mean path loss model: d_hat = 10^((C - K - mu_j - rss)/20).
/// The ground range is clamped at zero when d_hat falls below the altitude;
/// the observation is kept rather than dropped.
inline RangeEstimate estimate_distance(const RangeObservation& obs, double altitude_m,
                                       const ChannelParams& p) {
    if (!std::isfinite(obs.rss_avg_dbm)) {
        throw std::invalid_argument("estimate_distance: rss_avg must be finite");
    }
    if (obs.n_samples < 1) {
        throw std::invalid_argument("estimate_distance: n_samples must be >= 1");
    }
    const double k = free_space_constant(p);
    const double mu = p.mu_db(obs.assumed_class);
    RangeEstimate est;
    est.slant_m = std::pow(10.0, (p.c_offset_dbm - k - mu - obs.rss_avg_dbm) / 20.0);
    const double excess = est.slant_m * est.slant_m - altitude_m * altitude_m;
    est.ground_m = excess > 0.0 ? std::sqrt(excess) : 0.0;
    return est;
}

struct PositionEstimate {
    Vec2 xy{0.0, 0.0};
    std::vector<double> range_residuals;  // |r_hat_i - dist(anchor_i, xy)|
    bool converged = false;
};

namespace detail {

inline double multilat_objective(const Vec2& p, std::span<const Vec2> anchors,
                                 std::span<const double> ranges) {
    double acc = 0.0;
    for (size_t i = 0; i < anchors.size(); ++i) {
        const double f = distance(p, anchors[i]) - ranges[i];
        acc += f * f;
    }
    return acc;
}

/// Closed-form initializer: subtracting squared-range equations pairwise
/// yields a linear system in (x, y), solved in least squares.
inline Vec2 linearized_init(std::span<const Vec2> anchors, std::span<const double> ranges) {
    const Vec2 a0 = anchors[0];
    const double r0 = ranges[0];
    double n00 = 0.0, n01 = 0.0, n11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (size_t i = 1; i < anchors.size(); ++i) {
        const double ax = 2.0 * (anchors[i].x - a0.x);
        const double ay = 2.0 * (anchors[i].y - a0.y);
        const double rhs = r0 * r0 - ranges[i] * ranges[i] + anchors[i].norm2() - a0.norm2();
        n00 += ax * ax;
        n01 += ax * ay;
        n11 += ay * ay;
        g0 += ax * rhs;
        g1 += ay * rhs;
    }
    const double det = n00 * n11 - n01 * n01;
    if (std::abs(det) < 1e-12 * std::max(1.0, n00 + n11)) {
        // fall back to the anchor centroid; the damped solver takes it from here
        Vec2 c{0.0, 0.0};
        for (const Vec2& a : anchors) c = c + a;
        return c * (1.0 / double(anchors.size()));
    }
    return {(g0 * n11 - n01 * g1) / det, (n00 * g1 - n01 * g0) / det};
}

struct SolveRun {
    Vec2 xy;
    double objective;
    bool converged;
};

/// Damped Gauss-Newton on the range residuals. Steps are accepted only when
/// the objective decreases, so the result can never be worse than the start.
inline SolveRun solve_from(Vec2 p, std::span<const Vec2> anchors,
                           std::span<const double> ranges, double step_tol, int max_iter) {
    double cost = multilat_objective(p, anchors, ranges);
    double lambda = 1e-3;
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
        for (size_t i = 0; i < anchors.size(); ++i) {
            Vec2 diff = p - anchors[i];
            double dist = diff.norm();
            if (dist < 1e-12) {
                diff = {1.0, 0.0};
                dist = 1e-12;
            }
            const double f = dist - ranges[i];
            const double jx = diff.x / dist;
            const double jy = diff.y / dist;
            h00 += jx * jx;
            h01 += jx * jy;
            h11 += jy * jy;
            g0 += jx * f;
            g1 += jy * f;
        }
        const double a00 = h00 + lambda, a11 = h11 + lambda;
        const double det = a00 * a11 - h01 * h01;
        if (!(std::abs(det) > 0.0)) break;
        const double dx = -(g0 * a11 - h01 * g1) / det;
        const double dy = -(a00 * g1 - h01 * g0) / det;
        const Vec2 trial{p.x + dx, p.y + dy};
        const double trial_cost = multilat_objective(trial, anchors, ranges);
        if (trial_cost <= cost && std::hypot(dx, dy) < step_tol) {
            if (trial_cost < cost) {
                p = trial;
                cost = trial_cost;
            }
            converged = true;
            break;
        }
        if (trial_cost < cost) {
            p = trial;
            cost = trial_cost;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {p, cost, converged};
}

}  // namespace detail

/// Estimate a 2-D position from ground ranges to known anchor points by
/// minimizing the sum of squared range residuals. Initialized from the
/// linearized trilateration solution and refined by damped Gauss-Newton until
/// the step falls below 1e-6 m or 200 iterations. When the final residuals
/// look multimodal (max > 10x median), the solve restarts from four offset
/// initializers and keeps the lowest objective.
inline PositionEstimate multilaterate(std::span<const Vec2> anchors,
                                      std::span<const double> ranges,
                                      std::optional<Vec2> initial = std::nullopt) {
    if (anchors.size() != ranges.size()) {
        throw std::invalid_argument("multilaterate: anchors and ranges differ in length");
    }
    if (anchors.size() < 3) {
        throw std::invalid_argument("multilaterate: underdetermined (need >= 3 observations, got " +
                                    std::to_string(anchors.size()) + ")");
    }

    // reject collinear anchor sets: smallest eigenvalue of the anchor scatter
    Vec2 centroid{0.0, 0.0};
    for (const Vec2& a : anchors) centroid = centroid + a;
    centroid = centroid * (1.0 / double(anchors.size()));
    double sxx = 0.0, sxy = 0.0, syy = 0.0, spread = 0.0;
    for (const Vec2& a : anchors) {
        const Vec2 d = a - centroid;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
        spread += d.norm();
    }
    spread /= double(anchors.size());
    const double tr = sxx + syy;
    const double lam_min = tr / 2.0 - std::sqrt((sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy);
    if (lam_min <= 1e-12 * std::max(tr, 1.0)) {
        throw std::invalid_argument("multilaterate: degenerate geometry (collinear anchors)");
    }

    constexpr double kStepTol = 1e-6;
    constexpr int kMaxIter = 200;
    const Vec2 start = initial ? *initial : detail::linearized_init(anchors, ranges);
    detail::SolveRun best = detail::solve_from(start, anchors, ranges, kStepTol, kMaxIter);

    // restart heuristic for suspected local minima
    std::vector<double> res(anchors.size());
    for (size_t i = 0; i < anchors.size(); ++i) {
        res[i] = std::abs(distance(best.xy, anchors[i]) - ranges[i]);
    }
    std::vector<double> sorted = res;
    std::nth_element(sorted.begin(), sorted.begin() + long(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double worst = *std::max_element(res.begin(), res.end());
    if (worst > 10.0 * median + 1e-9) {
        const double off = spread / 2.0;
        const Vec2 starts[4] = {{centroid.x + off, centroid.y},
                                {centroid.x - off, centroid.y},
                                {centroid.x, centroid.y + off},
                                {centroid.x, centroid.y - off}};
        for (const Vec2& s : starts) {
            detail::SolveRun run = detail::solve_from(s, anchors, ranges, kStepTol, kMaxIter);
            if (run.objective < best.objective) best = run;
        }
    }

    PositionEstimate est;
    est.xy = best.xy;
    est.converged = best.converged;
    est.range_residuals.resize(anchors.size());
    for (size_t i = 0; i < anchors.size(); ++i) {
        est.range_residuals[i] = std::abs(distance(best.xy, anchors[i]) - ranges[i]);
    }
    return est;
}

/// Euclidean norm of the range-vector error sqrt(sum |r_hat_i - r_i|^2).
inline double range_error(std::span<const double> r_true, std::span<const double> r_hat) {
    if (r_true.size() != r_hat.size()) {
        throw std::invalid_argument("range_error: vectors differ in length (" +
                                    std::to_string(r_true.size()) + " vs " +
                                    std::to_string(r_hat.size()) + ")");
    }
    double acc = 0.0;
    for (size_t i = 0; i < r_true.size(); ++i) {
        const double e = r_hat[i] - r_true[i];
        acc += e * e;
    }
    return std::sqrt(acc);
}

/// Euclidean distance between the true and estimated positions.
inline double position_error(const Vec2& true_xy, const PositionEstimate& est) {
    return distance(true_xy, est.xy);
}

/// LoS-probability-weighted average of class-conditional errors.
inline double average_error(double e_los, double e_nlos, double theta_rad,
                            const ChannelParams& p) {
    if (!(e_los >= 0.0) || !(e_nlos >= 0.0)) {
        throw std::invalid_argument("average_error: errors must be >= 0");
    }
    const double pl = p_los(theta_rad, p);
    return pl * e_los + (1.0 - pl) * e_nlos;
}

}  // namespace uavloc
