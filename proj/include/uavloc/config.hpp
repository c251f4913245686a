#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uavloc/channel.hpp"
#include "uavloc/crlb.hpp"
#include "uavloc/energy.hpp"
#include "uavloc/experiment.hpp"
#include "uavloc/trajectory.hpp"

namespace uavloc {

/// Full run configuration. An empty document yields the default parameter
/// set; every value can be overridden by a `key = value` line under its
/// section. Unknown sections or keys are rejected.
struct RunConfig {
    ChannelParams channel;
    AirframeParams airframe;
    Trajectory trajectory;
    Scenario scenario;
    CoverageSpec coverage;
    std::string output_path;

    void validate() const {
        channel.validate();
        airframe.validate();
        trajectory.validate();
        scenario.validate();
        coverage.validate();
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view value, const std::string& key) {
    const std::string text(value);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty()) {
        throw std::invalid_argument("config: " + key + ": expected a number (got \"" + text +
                                    "\")");
    }
    return v;
}

inline long long parse_int(std::string_view value, const std::string& key) {
    const double v = parse_double(value, key);
    const long long i = static_cast<long long>(v);
    if (double(i) != v) {
        throw std::invalid_argument("config: " + key + ": expected an integer (got \"" +
                                    std::string(value) + "\")");
    }
    return i;
}

inline bool parse_bool(std::string_view value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: " + key + ": expected true/false (got \"" +
                                std::string(value) + "\")");
}

inline LinkMode parse_link_mode(std::string_view value, const std::string& key) {
    if (value == "bernoulli") return LinkMode::kBernoulli;
    if (value == "conditioned_los") return LinkMode::kConditionedLos;
    if (value == "conditioned_nlos") return LinkMode::kConditionedNlos;
    if (value == "averaged") return LinkMode::kAveraged;
    throw std::invalid_argument(
        "config: " + key +
        ": expected one of bernoulli|conditioned_los|conditioned_nlos|averaged (got \"" +
        std::string(value) + "\")");
}

}  // namespace detail

/// Parse a flat `[section]` / `key = value` document into a RunConfig.
/// Lines starting with `#` or `;` are comments. All parameters default to
/// their standard values; validation errors name the offending key.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const size_t comment = raw.find_first_of("#;");
        if (comment != std::string_view::npos) raw = raw.substr(0, comment);
        const std::string_view line = detail::trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                            ": malformed section header");
            }
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "channel" && section != "airframe" && section != "trajectory" &&
                section != "scenario" && section != "coverage" && section != "output") {
                throw std::invalid_argument("config: unknown section [" + section + "]");
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": empty key");
        }
        const std::string qual = section.empty() ? key : section + "." + key;

        if (section == "channel") {
            auto& c = cfg.channel;
            if (key == "frequency_hz") c.frequency_hz = detail::parse_double(value, qual);
            else if (key == "a_o") c.a_o = detail::parse_double(value, qual);
            else if (key == "b_o") c.b_o = detail::parse_double(value, qual);
            else if (key == "a_los") c.a_los = detail::parse_double(value, qual);
            else if (key == "b_los") c.b_los = detail::parse_double(value, qual);
            else if (key == "a_nlos") c.a_nlos = detail::parse_double(value, qual);
            else if (key == "b_nlos") c.b_nlos = detail::parse_double(value, qual);
            else if (key == "mu_los_db") c.mu_los_db = detail::parse_double(value, qual);
            else if (key == "mu_nlos_db") c.mu_nlos_db = detail::parse_double(value, qual);
            else if (key == "c_offset_dbm") c.c_offset_dbm = detail::parse_double(value, qual);
            else throw std::invalid_argument("config: unknown key " + qual);
        } else if (section == "airframe") {
            auto& a = cfg.airframe;
            if (key == "mass_kg") a.mass_kg = detail::parse_double(value, qual);
            else if (key == "gravity_mps2") a.gravity_mps2 = detail::parse_double(value, qual);
            else if (key == "air_density") a.air_density = detail::parse_double(value, qual);
            else if (key == "drag_area_m2") a.drag_area_m2 = detail::parse_double(value, qual);
            else if (key == "rotor_area_m2") a.rotor_area_m2 = detail::parse_double(value, qual);
            else if (key == "blade_power_w") a.blade_power_w = detail::parse_double(value, qual);
            else if (key == "tip_speed_mps") a.tip_speed_mps = detail::parse_double(value, qual);
            else throw std::invalid_argument("config: unknown key " + qual);
        } else if (section == "trajectory") {
            auto& t = cfg.trajectory;
            if (key == "center_x_m") t.center.x = detail::parse_double(value, qual);
            else if (key == "center_y_m") t.center.y = detail::parse_double(value, qual);
            else if (key == "radius_m") t.radius_m = detail::parse_double(value, qual);
            else if (key == "altitude_m") t.altitude_m = detail::parse_double(value, qual);
            else if (key == "waypoints") t.n_waypoints = int(detail::parse_int(value, qual));
            else if (key == "hover_time_s") t.hover_time_s = detail::parse_double(value, qual);
            else if (key == "cruise_speed_mps")
                t.cruise_speed_mps = detail::parse_double(value, qual);
            else if (key == "phase_rad") t.phase_rad = detail::parse_double(value, qual);
            else throw std::invalid_argument("config: unknown key " + qual);
        } else if (section == "scenario") {
            auto& s = cfg.scenario;
            if (key == "area_radius_m") s.area_radius_m = detail::parse_double(value, qual);
            else if (key == "nodes") s.n_nodes = int(detail::parse_int(value, qual));
            else if (key == "sample_rate_hz") s.sample_rate_hz = detail::parse_double(value, qual);
            else if (key == "trials") s.n_trials = int(detail::parse_int(value, qual));
            else if (key == "seed") s.seed = std::uint64_t(detail::parse_int(value, qual));
            else if (key == "link_mode") s.link_mode = detail::parse_link_mode(value, qual);
            else if (key == "resample_nodes") s.resample_nodes = detail::parse_bool(value, qual);
            else if (key == "blind_estimator")
                s.blind_assume_los = detail::parse_bool(value, qual);
            else if (key == "shadowing_scale")
                s.shadowing_scale = detail::parse_double(value, qual);
            else if (key == "threads") s.n_threads = int(detail::parse_int(value, qual));
            else throw std::invalid_argument("config: unknown key " + qual);
        } else if (section == "coverage") {
            auto& c = cfg.coverage;
            if (key == "delta") c.delta = detail::parse_double(value, qual);
            else if (key == "resolution_m") c.resolution_m = detail::parse_double(value, qual);
            else if (key == "n_samples") c.n_samples = int(detail::parse_int(value, qual));
            else throw std::invalid_argument("config: unknown key " + qual);
        } else if (section == "output") {
            if (key == "path") cfg.output_path = std::string(value);
            else throw std::invalid_argument("config: unknown key " + qual);
        } else {
            throw std::invalid_argument("config: key \"" + key +
                                        "\" appears before any [section] header");
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open \"" + path + "\"");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace uavloc
