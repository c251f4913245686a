#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "uavloc/channel.hpp"
#include "uavloc/crlb.hpp"
#include "uavloc/energy.hpp"
#include "uavloc/estimation.hpp"
#include "uavloc/geometry.hpp"
#include "uavloc/rng.hpp"
#include "uavloc/trajectory.hpp"

namespace uavloc {

enum class LinkMode { kBernoulli, kConditionedLos, kConditionedNlos, kAveraged };

/// Ground-node population and Monte-Carlo plan. Node positions are drawn
/// uniformly in a disk concentric with the trajectory and, by default, stay
/// fixed across trials so that sweeps compare the same population.
struct Scenario {
    double area_radius_m = 200.0;
    int n_nodes = 100;
    double sample_rate_hz = 2.0;  // RSS samples per second of hovering
    int n_trials = 1000;
    std::uint64_t seed = 42;
    LinkMode link_mode = LinkMode::kBernoulli;
    bool resample_nodes = false;    // fresh population per trial
    bool blind_assume_los = false;  // estimator ignores the true class
    double shadowing_scale = 1.0;   // 0 forces noiseless links
    int n_threads = 1;              // 0 = hardware concurrency

    void validate() const {
        if (n_nodes < 1) {
            throw std::invalid_argument("scenario.nodes: must be >= 1 (got " +
                                        std::to_string(n_nodes) + ")");
        }
        if (n_trials < 1) {
            throw std::invalid_argument("scenario.trials: must be >= 1 (got " +
                                        std::to_string(n_trials) + ")");
        }
        if (!(sample_rate_hz > 0.0)) {
            throw std::invalid_argument("scenario.sample_rate_hz: must be > 0 (got " +
                                        std::to_string(sample_rate_hz) + ")");
        }
        if (!(area_radius_m >= 0.0)) {
            throw std::invalid_argument("scenario.area_radius_m: must be >= 0 (got " +
                                        std::to_string(area_radius_m) + ")");
        }
        if (!(shadowing_scale >= 0.0)) {
            throw std::invalid_argument("scenario.shadowing_scale: must be >= 0 (got " +
                                        std::to_string(shadowing_scale) + ")");
        }
        if (n_threads < 0) {
            throw std::invalid_argument("scenario.threads: must be >= 0 (got " +
                                        std::to_string(n_threads) + ")");
        }
    }
};

/// One row of a sweep: the swept value and the population means.
struct SweepResult {
    double swept_value = 0.0;
    double mean_pos_err_m = 0.0;
    double mean_range_err_m = 0.0;
    double mission_energy_j = 0.0;
    double coverage_area_m2 = 0.0;
    int covered_nodes = 0;
};

struct EvalResult {
    SweepResult summary;
    double pos_err_se_m = 0.0;  // Monte-Carlo standard error of the mean
    double covered_mean_pos_err_m = std::numeric_limits<double>::quiet_NaN();
    double covered_mean_range_err_m = std::numeric_limits<double>::quiet_NaN();
    bool zero_covered = false;
    CoverageResult coverage;
    std::vector<Vec2> node_positions;
    std::vector<char> node_covered;
    std::vector<double> node_mean_pos_err_m;
};

struct DesignPoint {
    double altitude_m = 200.0;
    double radius_m = 120.0;
    int n_waypoints = 3;
    double hover_time_s = 5.0;

    Trajectory to_trajectory(const Trajectory& path_template) const {
        Trajectory t = path_template;
        t.altitude_m = altitude_m;
        t.radius_m = radius_m;
        t.n_waypoints = n_waypoints;
        t.hover_time_s = hover_time_s;
        t.hover_schedule_s.clear();
        return t;
    }
};

namespace detail {

inline constexpr std::uint64_t kNodeStream = 0;
inline constexpr std::uint64_t kTrialStreamBase = 1;
inline constexpr std::uint64_t kResampleStreamBase = 1ull << 32;

inline std::vector<Vec2> sample_nodes(const Vec2& center, double area_radius,
                                      int n_nodes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec2> nodes;
    nodes.reserve(size_t(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
        const double ang = 2.0 * kPi * unit(rng);
        const double rad = area_radius * std::sqrt(unit(rng));
        nodes.push_back({center.x + rad * std::cos(ang), center.y + rad * std::sin(ang)});
    }
    return nodes;
}

// Per-node, per-waypoint link constants, flattened node-major.
struct LinkTables {
    std::vector<double> r_true, theta, plos, mrp_los, mrp_nlos, sigma_los, sigma_nlos;

    void build(std::span<const Vec2> nodes, std::span<const Vec2> anchors, double altitude,
               const ChannelParams& ch, double shadowing_scale) {
        const size_t total = nodes.size() * anchors.size();
        r_true.resize(total);
        theta.resize(total);
        plos.resize(total);
        mrp_los.resize(total);
        mrp_nlos.resize(total);
        sigma_los.resize(total);
        sigma_nlos.resize(total);
        size_t idx = 0;
        for (const Vec2& node : nodes) {
            for (const Vec2& anchor : anchors) {
                const LinkGeometry g =
                    LinkGeometry::from_horizontal(distance(node, anchor), altitude);
                r_true[idx] = g.range_m;
                theta[idx] = g.elevation_rad;
                plos[idx] = p_los(g.elevation_rad, ch);
                mrp_los[idx] = mean_received_power(g.slant_m, LinkClass::kLos, ch);
                mrp_nlos[idx] = mean_received_power(g.slant_m, LinkClass::kNlos, ch);
                sigma_los[idx] =
                    shadowing_sigma(g.elevation_rad, LinkClass::kLos, ch) * shadowing_scale;
                sigma_nlos[idx] =
                    shadowing_sigma(g.elevation_rad, LinkClass::kNlos, ch) * shadowing_scale;
                ++idx;
            }
        }
    }
};

struct TrialContext {
    std::span<const Vec2> anchors;
    double altitude = 0.0;
    std::span<const int> n_rss;  // per waypoint
    const ChannelParams* channel = nullptr;
    const Scenario* scenario = nullptr;
};

// One conditioned estimation pass over a node's links; `z` holds the
// standard-normal draws, one per link.
inline void estimate_pass(const TrialContext& ctx, const LinkTables& tab, size_t node_base,
                          std::span<const LinkClass> classes, std::span<const double> z,
                          std::vector<double>& r_hat_out) {
    const size_t m = ctx.anchors.size();
    r_hat_out.resize(m);
    for (size_t i = 0; i < m; ++i) {
        const size_t idx = node_base + i;
        const bool los = classes[i] == LinkClass::kLos;
        const double mean = los ? tab.mrp_los[idx] : tab.mrp_nlos[idx];
        const double sigma = (los ? tab.sigma_los[idx] : tab.sigma_nlos[idx]) /
                             std::sqrt(double(ctx.n_rss[i]));
        RangeObservation obs;
        obs.waypoint_index = int(i);
        obs.anchor_xy = ctx.anchors[i];
        obs.rss_avg_dbm = mean - z[i] * sigma;
        obs.assumed_class = ctx.scenario->blind_assume_los ? LinkClass::kLos : classes[i];
        obs.n_samples = ctx.n_rss[i];
        r_hat_out[i] = estimate_distance(obs, ctx.altitude, *ctx.channel).ground_m;
    }
}

struct NodeOutcome {
    double pos_err = 0.0;
    double range_err = 0.0;
};

inline NodeOutcome run_node(const TrialContext& ctx, const LinkTables& tab, size_t node_index,
                            const Vec2& node_pos, std::mt19937_64& eng,
                            std::normal_distribution<double>& normal,
                            std::uniform_real_distribution<double>& unit) {
    const size_t m = ctx.anchors.size();
    const size_t base = node_index * m;
    std::vector<LinkClass> classes(m);
    std::vector<double> z(m);
    std::vector<double> r_hat;
    std::span<const double> r_true(&tab.r_true[base], m);

    const LinkMode mode = ctx.scenario->link_mode;
    if (mode == LinkMode::kAveraged) {
        // both conditioned passes, then the LoS-probability-weighted blend
        std::vector<double> z_nlos(m);
        for (size_t i = 0; i < m; ++i) z[i] = normal(eng);
        for (size_t i = 0; i < m; ++i) z_nlos[i] = normal(eng);

        std::fill(classes.begin(), classes.end(), LinkClass::kLos);
        estimate_pass(ctx, tab, base, classes, z, r_hat);
        PositionEstimate est_los = multilaterate(ctx.anchors, r_hat);
        const double pos_los = position_error(node_pos, est_los);
        const double rng_los = range_error(r_true, r_hat);

        std::fill(classes.begin(), classes.end(), LinkClass::kNlos);
        estimate_pass(ctx, tab, base, classes, z_nlos, r_hat);
        PositionEstimate est_nlos = multilaterate(ctx.anchors, r_hat);
        const double pos_nlos = position_error(node_pos, est_nlos);
        const double rng_nlos = range_error(r_true, r_hat);

        double p_mean = 0.0;
        for (size_t i = 0; i < m; ++i) p_mean += tab.plos[base + i];
        p_mean /= double(m);
        return {p_mean * pos_los + (1.0 - p_mean) * pos_nlos,
                p_mean * rng_los + (1.0 - p_mean) * rng_nlos};
    }

    for (size_t i = 0; i < m; ++i) {
        switch (mode) {
            case LinkMode::kBernoulli: {
                const double u = unit(eng);
                classes[i] = u < tab.plos[base + i] ? LinkClass::kLos : LinkClass::kNlos;
                break;
            }
            case LinkMode::kConditionedLos:
                classes[i] = LinkClass::kLos;
                break;
            case LinkMode::kConditionedNlos:
                classes[i] = LinkClass::kNlos;
                break;
            default:
                break;
        }
        z[i] = normal(eng);
    }
    estimate_pass(ctx, tab, base, classes, z, r_hat);
    PositionEstimate est = multilaterate(ctx.anchors, r_hat);
    return {position_error(node_pos, est), range_error(r_true, r_hat)};
}

}  // namespace detail

/// Monte-Carlo evaluation of one trajectory against a node population.
/// Deterministic for a given scenario seed: every trial draws from its own
/// substream and results are reduced in trial order, so the outcome does not
/// depend on the number of worker threads.
inline EvalResult evaluate(const Trajectory& traj, const Scenario& scenario,
                           const ChannelParams& channel, const AirframeParams& airframe,
                           const CoverageSpec& coverage_spec) {
    traj.validate();
    scenario.validate();
    channel.validate();
    airframe.validate();
    coverage_spec.validate();

    const int m = traj.n_waypoints;
    std::vector<Vec2> anchors;
    anchors.reserve(size_t(m));
    for (int k = 0; k < m; ++k) anchors.push_back(traj.ground_waypoint(k));

    std::vector<int> n_rss(static_cast<size_t>(m), 0);
    for (int k = 0; k < m; ++k) {
        n_rss[size_t(k)] = int(std::floor(scenario.sample_rate_hz * traj.hover_time_at(k)));
        if (n_rss[size_t(k)] < 1) {
            throw std::invalid_argument(
                "evaluate: sample_rate * hover_time must yield at least one RSS sample "
                "(waypoint " +
                std::to_string(k) + ")");
        }
    }

    std::mt19937_64 node_rng = substream(scenario.seed, detail::kNodeStream);
    const std::vector<Vec2> nodes = detail::sample_nodes(
        traj.center, scenario.area_radius_m, scenario.n_nodes, node_rng);

    const CoverageResult coverage = localization_coverage(traj, coverage_spec, channel);
    std::vector<char> covered(nodes.size(), 1);
    int covered_count = 0;
    for (size_t n = 0; n < nodes.size(); ++n) {
        for (const Vec2& a : anchors) {
            if (distance(nodes[n], a) > coverage.per_waypoint_radius_m[0]) {
                covered[n] = 0;
                break;
            }
        }
        covered_count += covered[n];
    }

    detail::LinkTables tables;
    if (!scenario.resample_nodes) {
        tables.build(nodes, anchors, traj.altitude_m, channel, scenario.shadowing_scale);
    }

    detail::TrialContext ctx;
    ctx.anchors = anchors;
    ctx.altitude = traj.altitude_m;
    ctx.n_rss = n_rss;
    ctx.channel = &channel;
    ctx.scenario = &scenario;

    const size_t n_trials = size_t(scenario.n_trials);
    const size_t n_nodes = nodes.size();
    std::vector<double> pos_err(n_trials * n_nodes);
    std::vector<double> rng_err(n_trials * n_nodes);

    auto run_trial = [&](size_t t) {
        std::mt19937_64 eng = substream(scenario.seed, detail::kTrialStreamBase + t);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const std::vector<Vec2>* trial_nodes = &nodes;
        std::vector<Vec2> local_nodes;
        detail::LinkTables local_tables;
        const detail::LinkTables* tab = &tables;
        if (scenario.resample_nodes) {
            std::mt19937_64 rng =
                substream(scenario.seed, detail::kResampleStreamBase + t);
            local_nodes = detail::sample_nodes(traj.center, scenario.area_radius_m,
                                               scenario.n_nodes, rng);
            local_tables.build(local_nodes, anchors, traj.altitude_m, channel,
                               scenario.shadowing_scale);
            trial_nodes = &local_nodes;
            tab = &local_tables;
        }
        for (size_t n = 0; n < n_nodes; ++n) {
            const detail::NodeOutcome out =
                detail::run_node(ctx, *tab, n, (*trial_nodes)[n], eng, normal, unit);
            pos_err[t * n_nodes + n] = out.pos_err;
            rng_err[t * n_nodes + n] = out.range_err;
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    size_t workers = scenario.n_threads == 0 ? std::max(1u, hw) : unsigned(scenario.n_threads);
    workers = std::min(workers, n_trials);
    if (workers <= 1) {
        for (size_t t = 0; t < n_trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (size_t t = w; t < n_trials; t += workers) run_trial(t);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    // fixed-order reduction: trials outer, nodes inner
    EvalResult result;
    result.coverage = coverage;
    result.node_positions = nodes;
    result.node_covered = covered;
    result.node_mean_pos_err_m.assign(n_nodes, 0.0);
    double sum_pos = 0.0, sum_rng = 0.0, sum_pos_cov = 0.0, sum_rng_cov = 0.0;
    std::vector<double> trial_means(n_trials, 0.0);
    for (size_t t = 0; t < n_trials; ++t) {
        double trial_sum = 0.0;
        for (size_t n = 0; n < n_nodes; ++n) {
            const double pe = pos_err[t * n_nodes + n];
            const double re = rng_err[t * n_nodes + n];
            sum_pos += pe;
            sum_rng += re;
            trial_sum += pe;
            result.node_mean_pos_err_m[n] += pe;
            if (covered[n]) {
                sum_pos_cov += pe;
                sum_rng_cov += re;
            }
        }
        trial_means[t] = trial_sum / double(n_nodes);
    }
    const double total = double(n_trials * n_nodes);
    for (double& v : result.node_mean_pos_err_m) v /= double(n_trials);

    result.summary.mean_pos_err_m = sum_pos / total;
    result.summary.mean_range_err_m = sum_rng / total;
    result.summary.mission_energy_j = mission_energy(traj, airframe);
    result.summary.coverage_area_m2 = coverage.area_m2;
    result.summary.covered_nodes = covered_count;
    result.zero_covered = covered_count == 0;
    if (covered_count > 0) {
        const double total_cov = double(n_trials) * double(covered_count);
        result.covered_mean_pos_err_m = sum_pos_cov / total_cov;
        result.covered_mean_range_err_m = sum_rng_cov / total_cov;
    }
    if (n_trials > 1) {
        double mean = 0.0;
        for (double v : trial_means) mean += v;
        mean /= double(n_trials);
        double var = 0.0;
        for (double v : trial_means) var += (v - mean) * (v - mean);
        var /= double(n_trials - 1);
        result.pos_err_se_m = std::sqrt(var / double(n_trials));
    }
    return result;
}

enum class SweepAxis { kAltitude, kRadius, kHoverTime, kWaypoints };

/// Re-evaluate the base trajectory with one design variable swept over a grid.
inline std::vector<EvalResult> sweep_detailed(SweepAxis axis, std::span<const double> grid,
                                              const Trajectory& base, const Scenario& scenario,
                                              const ChannelParams& channel,
                                              const AirframeParams& airframe,
                                              const CoverageSpec& coverage_spec) {
    if (grid.empty()) {
        throw std::invalid_argument("sweep: grid must be nonempty");
    }
    std::vector<EvalResult> out;
    out.reserve(grid.size());
    for (double value : grid) {
        Trajectory t = base;
        switch (axis) {
            case SweepAxis::kAltitude:
                t.altitude_m = value;
                break;
            case SweepAxis::kRadius:
                t.radius_m = value;
                break;
            case SweepAxis::kHoverTime:
                t.hover_time_s = value;
                t.hover_schedule_s.clear();
                break;
            case SweepAxis::kWaypoints:
                t.n_waypoints = int(std::lround(value));
                t.hover_schedule_s.clear();
                break;
        }
        EvalResult r = evaluate(t, scenario, channel, airframe, coverage_spec);
        r.summary.swept_value = value;
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<SweepResult> sweep(SweepAxis axis, std::span<const double> grid,
                                      const Trajectory& base, const Scenario& scenario,
                                      const ChannelParams& channel,
                                      const AirframeParams& airframe,
                                      const CoverageSpec& coverage_spec) {
    std::vector<SweepResult> out;
    for (EvalResult& r :
         sweep_detailed(axis, grid, base, scenario, channel, airframe, coverage_spec)) {
        out.push_back(r.summary);
    }
    return out;
}

struct OptimizeRow {
    DesignPoint point;
    double energy_j = 0.0;
    bool energy_ok = false;
    bool coverage_ok = false;
    bool feasible = false;
    double mean_pos_err_m = std::numeric_limits<double>::quiet_NaN();
};

struct OptimizeResult {
    bool feasible = false;
    DesignPoint best;
    SweepResult best_summary;
    std::vector<OptimizeRow> rows;
};

/// Exhaustive grid search over (h, R, M, t_h). A point is feasible when its
/// mission energy fits the budget and every node lies inside the localization
/// coverage; the feasible point with the lowest mean position error wins,
/// ties broken by lower energy, then lower altitude.
inline OptimizeResult optimize(double budget_j, std::span<const double> altitude_grid,
                               std::span<const double> radius_grid,
                               std::span<const int> waypoint_grid,
                               std::span<const double> hover_grid, const Trajectory& base,
                               const Scenario& scenario, const ChannelParams& channel,
                               const AirframeParams& airframe,
                               const CoverageSpec& coverage_spec) {
    if (!(budget_j > 0.0)) {
        throw std::invalid_argument("optimize: energy budget must be > 0");
    }
    if (altitude_grid.empty() || radius_grid.empty() || waypoint_grid.empty() ||
        hover_grid.empty()) {
        throw std::invalid_argument("optimize: all grids must be nonempty");
    }

    std::mt19937_64 node_rng = substream(scenario.seed, detail::kNodeStream);
    const std::vector<Vec2> nodes = detail::sample_nodes(
        base.center, scenario.area_radius_m, scenario.n_nodes, node_rng);

    OptimizeResult result;
    bool have_best = false;
    for (double h : altitude_grid) {
        for (double r : radius_grid) {
            for (int m : waypoint_grid) {
                for (double th : hover_grid) {
                    DesignPoint point{h, r, m, th};
                    Trajectory t = point.to_trajectory(base);
                    t.validate();

                    OptimizeRow row;
                    row.point = point;
                    row.energy_j = mission_energy(t, airframe);
                    row.energy_ok = row.energy_j <= budget_j;

                    const CoverageRadius rc = coverage_radius(h, coverage_spec, channel);
                    int covered = 0;
                    for (const Vec2& node : nodes) {
                        bool in_all = true;
                        for (int k = 0; k < m; ++k) {
                            if (distance(node, t.ground_waypoint(k)) > rc.radius_m) {
                                in_all = false;
                                break;
                            }
                        }
                        covered += in_all ? 1 : 0;
                    }
                    row.coverage_ok = covered == scenario.n_nodes;
                    row.feasible = row.energy_ok && row.coverage_ok;

                    if (row.feasible) {
                        EvalResult eval =
                            evaluate(t, scenario, channel, airframe, coverage_spec);
                        row.mean_pos_err_m = eval.summary.mean_pos_err_m;
                        const bool better =
                            !have_best ||
                            row.mean_pos_err_m < result.best_summary.mean_pos_err_m ||
                            (row.mean_pos_err_m == result.best_summary.mean_pos_err_m &&
                             (row.energy_j < result.best_summary.mission_energy_j ||
                              (row.energy_j == result.best_summary.mission_energy_j &&
                               h < result.best.altitude_m)));
                        if (better) {
                            have_best = true;
                            result.best = point;
                            result.best_summary = eval.summary;
                        }
                    }
                    result.rows.push_back(row);
                }
            }
        }
    }
    result.feasible = have_best;
    return result;
}

}  // namespace uavloc
