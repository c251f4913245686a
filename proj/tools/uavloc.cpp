// Command-line front end: parameter sweeps, coverage analysis, and the
// energy-constrained trajectory grid search, all emitting plot-ready CSV.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavloc/config.hpp"
#include "uavloc/csv.hpp"
#include "uavloc/experiment.hpp"

namespace {

using namespace uavloc;

constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct CommonOpts {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int trials = 0;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    o.sub = sub;
    sub->add_option("--config", o.config_path, "configuration file (key = value sections)");
    sub->add_option("--out", o.out_path, "output CSV path");
    sub->add_option("--seed", o.seed, "Monte-Carlo master seed");
    sub->add_option("--trials", o.trials, "Monte-Carlo trials");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

RunConfig make_config(const CommonOpts& o, const std::string& default_out) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
    if (o.sub->count("--seed")) cfg.scenario.seed = o.seed;
    if (o.sub->count("--trials")) cfg.scenario.n_trials = o.trials;
    if (o.sub->count("--threads")) cfg.scenario.n_threads = o.threads;
    if (o.sub->count("--out")) cfg.output_path = o.out_path;
    if (cfg.output_path.empty()) cfg.output_path = default_out;
    cfg.validate();
    return cfg;
}

std::vector<double> make_grid(double lo, double hi, double step, const std::string& what) {
    if (!(step > 0.0) || hi < lo) {
        throw std::invalid_argument(what + ": need min <= max and step > 0");
    }
    std::vector<double> grid;
    for (double v = lo; v <= hi + step * 1e-9; v += step) grid.push_back(v);
    return grid;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepResult>& rows) {
    CsvWriter csv(path);
    csv.header({"swept_value", "mean_pos_err_m", "mean_range_err_m", "energy_j",
                "coverage_m2", "covered_nodes"});
    for (const SweepResult& r : rows) {
        csv.row({csv_number(r.swept_value), csv_number(r.mean_pos_err_m),
                 csv_number(r.mean_range_err_m), csv_number(r.mission_energy_j),
                 csv_number(r.coverage_area_m2), csv_number(r.covered_nodes)});
    }
    csv.close();
}

void print_sweep_summary(const char* axis, const std::vector<SweepResult>& rows) {
    const SweepResult* best = &rows.front();
    for (const SweepResult& r : rows) {
        if (r.mean_pos_err_m < best->mean_pos_err_m) best = &r;
    }
    std::cout << "min mean_pos_err = " << best->mean_pos_err_m << " m at " << axis << " = "
              << best->swept_value << ", energy = " << best->mission_energy_j << " J\n";
}

int run_power_curve(const CommonOpts& o, double v_min, double v_max, double v_step) {
    RunConfig cfg = make_config(o, "power_curve.csv");
    const std::vector<double> grid = make_grid(v_min, v_max, v_step, "power-curve v grid");
    CsvWriter csv(cfg.output_path);
    csv.header({"v_mps", "induced_w", "parasitic_w", "blade_w", "total_w"});
    for (double v : grid) {
        const PowerBreakdown pb = forward_flight_power_components(v, cfg.airframe);
        csv.row({csv_number(v), csv_number(pb.induced_w), csv_number(pb.parasitic_w),
                 csv_number(pb.blade_profile_w), csv_number(pb.total_w())});
    }
    csv.close();
    const double v_opt = optimal_cruise_speed(cfg.airframe);
    std::cout << "optimal cruise speed = " << v_opt
              << " m/s, P_ff = " << forward_flight_power(v_opt, cfg.airframe)
              << " W, hover power = " << hover_power(cfg.airframe) << " W\n";
    return 0;
}

int run_sweep(const CommonOpts& o, SweepAxis axis, const char* axis_name,
              const std::vector<double>& grid, const std::string& default_out) {
    RunConfig cfg = make_config(o, default_out);
    const std::vector<SweepResult> rows = sweep(axis, grid, cfg.trajectory, cfg.scenario,
                                                cfg.channel, cfg.airframe, cfg.coverage);
    write_sweep_csv(cfg.output_path, rows);
    print_sweep_summary(axis_name, rows);
    return 0;
}

int run_coverage(const CommonOpts& o, double h_min, double h_max, double h_step) {
    RunConfig cfg = make_config(o, "coverage.csv");
    const std::vector<double> grid = make_grid(h_min, h_max, h_step, "coverage h grid");
    CsvWriter csv(cfg.output_path);
    csv.header({"h_m", "r_c_m", "area_m2"});
    double min_area = std::numeric_limits<double>::infinity();
    double min_h = grid.front();
    for (double h : grid) {
        Trajectory t = cfg.trajectory;
        t.altitude_m = h;
        const CoverageResult cov = localization_coverage(t, cfg.coverage, cfg.channel);
        csv.row({csv_number(h), csv_number(cov.per_waypoint_radius_m[0]),
                 csv_number(cov.area_m2)});
        if (cov.area_m2 < min_area) {
            min_area = cov.area_m2;
            min_h = h;
        }
    }
    csv.close();
    std::cout << "min coverage area = " << min_area << " m2 at h = " << min_h << " m\n";
    if (min_area <= 0.0) {
        std::cout << "note: coverage intersection is empty at some altitudes\n";
    }
    return 0;
}

int run_evaluate(const CommonOpts& o) {
    RunConfig cfg = make_config(o, "evaluate.csv");
    const EvalResult r =
        evaluate(cfg.trajectory, cfg.scenario, cfg.channel, cfg.airframe, cfg.coverage);
    CsvWriter csv(cfg.output_path);
    csv.header(
        {"mean_pos_err_m", "mean_range_err_m", "energy_j", "coverage_m2", "covered_nodes"});
    csv.row({csv_number(r.summary.mean_pos_err_m), csv_number(r.summary.mean_range_err_m),
             csv_number(r.summary.mission_energy_j), csv_number(r.summary.coverage_area_m2),
             csv_number(r.summary.covered_nodes)});
    csv.close();
    std::cout << "mean_pos_err = " << r.summary.mean_pos_err_m
              << " m, energy = " << r.summary.mission_energy_j
              << " J, covered nodes = " << r.summary.covered_nodes << "/"
              << cfg.scenario.n_nodes << "\n";
    if (r.zero_covered) {
        std::cout << "note: no node lies inside the localization coverage\n";
    }
    return 0;
}

struct OptimizeOpts {
    double h_min = 150.0, h_max = 1000.0, h_step = 50.0;
    double r_min = 40.0, r_max = 280.0, r_step = 40.0;
    std::vector<int> m_list{3};
    std::vector<double> th_list{5.0};
    double budget_j = 1e12;
};

int run_optimize(const CommonOpts& o, const OptimizeOpts& opt) {
    RunConfig cfg = make_config(o, "optimize.csv");
    const std::vector<double> h_grid =
        make_grid(opt.h_min, opt.h_max, opt.h_step, "optimize h grid");
    const std::vector<double> r_grid =
        make_grid(opt.r_min, opt.r_max, opt.r_step, "optimize R grid");
    const OptimizeResult result =
        optimize(opt.budget_j, h_grid, r_grid, opt.m_list, opt.th_list, cfg.trajectory,
                 cfg.scenario, cfg.channel, cfg.airframe, cfg.coverage);

    CsvWriter csv(cfg.output_path);
    csv.header(
        {"h_m", "r_m", "m_waypoints", "t_h_s", "mean_pos_err_m", "energy_j", "feasible"});
    for (const OptimizeRow& row : result.rows) {
        csv.row({csv_number(row.point.altitude_m), csv_number(row.point.radius_m),
                 csv_number(row.point.n_waypoints), csv_number(row.point.hover_time_s),
                 csv_number(row.mean_pos_err_m), csv_number(row.energy_j),
                 csv_number(int(row.feasible))});
    }
    csv.close();

    if (!result.feasible) {
        std::cout << "infeasible: no grid point satisfies the constraints\n";
        for (const OptimizeRow& row : result.rows) {
            std::cout << "  h=" << row.point.altitude_m << " R=" << row.point.radius_m
                      << " M=" << row.point.n_waypoints << " t_h=" << row.point.hover_time_s
                      << " binding=";
            if (!row.energy_ok && !row.coverage_ok) {
                std::cout << "energy+coverage";
            } else if (!row.energy_ok) {
                std::cout << "energy";
            } else {
                std::cout << "coverage";
            }
            std::cout << " (energy = " << row.energy_j << " J)\n";
        }
        return kExitInfeasible;
    }
    std::cout << "min mean_pos_err = " << result.best_summary.mean_pos_err_m
              << " m at h = " << result.best.altitude_m << ", R = " << result.best.radius_m
              << ", M = " << result.best.n_waypoints << ", t_h = " << result.best.hover_time_s
              << ", energy = " << result.best_summary.mission_energy_j << " J\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV aerial-anchor localization: trajectory sweeps, coverage and design search"};
    app.require_subcommand(1);

    CommonOpts pw, alt, rad, hov, cov, ev, op;
    double v_min = 0.0, v_max = 30.0, v_step = 0.1;
    double alt_min = 50.0, alt_max = 2000.0, alt_step = 50.0;
    double rad_min = 50.0, rad_max = 300.0, rad_step = 10.0;
    double hov_min = 5.0, hov_max = 60.0, hov_step = 5.0;
    double cov_min = 150.0, cov_max = 1900.0, cov_step = 50.0;
    OptimizeOpts opt;

    CLI::App* s_pw = app.add_subcommand("power-curve", "propulsion power decomposition vs speed");
    add_common(s_pw, pw);
    s_pw->add_option("--v-min", v_min, "lowest airspeed, m/s");
    s_pw->add_option("--v-max", v_max, "highest airspeed, m/s");
    s_pw->add_option("--v-step", v_step, "airspeed step, m/s");

    CLI::App* s_alt = app.add_subcommand("sweep-altitude", "localization error vs altitude");
    add_common(s_alt, alt);
    s_alt->add_option("--h-min", alt_min, "lowest altitude, m");
    s_alt->add_option("--h-max", alt_max, "highest altitude, m");
    s_alt->add_option("--h-step", alt_step, "altitude step, m");

    CLI::App* s_rad = app.add_subcommand("sweep-radius", "localization error vs path radius");
    add_common(s_rad, rad);
    s_rad->add_option("--r-min", rad_min, "lowest radius, m");
    s_rad->add_option("--r-max", rad_max, "highest radius, m");
    s_rad->add_option("--r-step", rad_step, "radius step, m");

    CLI::App* s_hov = app.add_subcommand("sweep-hover", "localization error vs hover time");
    add_common(s_hov, hov);
    s_hov->add_option("--th-min", hov_min, "shortest hover, s");
    s_hov->add_option("--th-max", hov_max, "longest hover, s");
    s_hov->add_option("--th-step", hov_step, "hover step, s");

    CLI::App* s_cov = app.add_subcommand("coverage", "coverage radius and area vs altitude");
    add_common(s_cov, cov);
    s_cov->add_option("--h-min", cov_min, "lowest altitude, m");
    s_cov->add_option("--h-max", cov_max, "highest altitude, m");
    s_cov->add_option("--h-step", cov_step, "altitude step, m");

    CLI::App* s_ev = app.add_subcommand("evaluate", "single design point evaluation");
    add_common(s_ev, ev);

    CLI::App* s_op =
        app.add_subcommand("optimize", "energy-constrained grid search over h, R, M, t_h");
    add_common(s_op, op);
    s_op->add_option("--h-min", opt.h_min, "lowest altitude, m");
    s_op->add_option("--h-max", opt.h_max, "highest altitude, m");
    s_op->add_option("--h-step", opt.h_step, "altitude step, m");
    s_op->add_option("--r-min", opt.r_min, "lowest radius, m");
    s_op->add_option("--r-max", opt.r_max, "highest radius, m");
    s_op->add_option("--r-step", opt.r_step, "radius step, m");
    s_op->add_option("--m-list", opt.m_list, "waypoint counts to try")->delimiter(',');
    s_op->add_option("--th-list", opt.th_list, "hover times to try, s")->delimiter(',');
    s_op->add_option("--budget-j", opt.budget_j, "mission energy budget, J");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_pw->parsed()) return run_power_curve(pw, v_min, v_max, v_step);
        if (s_alt->parsed())
            return run_sweep(alt, SweepAxis::kAltitude, "h",
                             make_grid(alt_min, alt_max, alt_step, "altitude grid"),
                             "sweep_altitude.csv");
        if (s_rad->parsed())
            return run_sweep(rad, SweepAxis::kRadius, "R",
                             make_grid(rad_min, rad_max, rad_step, "radius grid"),
                             "sweep_radius.csv");
        if (s_hov->parsed())
            return run_sweep(hov, SweepAxis::kHoverTime, "t_h",
                             make_grid(hov_min, hov_max, hov_step, "hover grid"),
                             "sweep_hover.csv");
        if (s_cov->parsed()) return run_coverage(cov, cov_min, cov_max, cov_step);
        if (s_ev->parsed()) return run_evaluate(ev);
        if (s_op->parsed()) return run_optimize(op, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
