#pragma once

// Experiment configuration: a single JSON document covering the field, the
// controller constants, the integration settings, the condition monitors,
// and optional parameter sweeps. Parsing applies documented defaults and
// reports schema violations by key.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curvetrak/analysis.hpp"
#include "curvetrak/errors.hpp"
#include "curvetrak/field.hpp"
#include "curvetrak/sim.hpp"

namespace curvetrak {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
    SimConfig sim;
    MonitorParams monitor;
    MetricsOptions metrics;
    std::string output_dir = "out";
    bool emit_trajectory = true;
    bool emit_summary = true;
    bool emit_plot = false;
    // Sweep entries in file order: parameter path -> values.
    std::vector<std::pair<std::string, std::vector<double>>> sweep;
};

namespace detail {

inline double num_at(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required key \"" + key + "\"");
    if (!j.at(key).is_number()) throw ConfigError("key \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline double num_or(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError("key \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline Vec2 vec2_at(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required key \"" + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("key \"" + key + "\" must be an array of two numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline Box box_at(const Json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError("key \"" + key + "\" must be [[xlo,ylo],[xhi,yhi]]");
    const auto corner = [&](const Json& c) -> Vec2 {
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw ConfigError("key \"" + key + "\" must be [[xlo,ylo],[xhi,yhi]]");
        return {c[0].get<double>(), c[1].get<double>()};
    };
    const Box box{corner(v[0]), corner(v[1])};
    if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y))
        throw ConfigError("key \"" + key + "\": low corner must be below high corner");
    return box;
}

}  // namespace detail

inline FieldModel parse_field(const Json& j) {
    if (!j.is_object()) throw ConfigError("key \"field\" must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("key \"field.kind\" must be a string");
    const std::string kind = j.at("kind").get<std::string>();

    FieldModel field;
    if (kind == "ellipse") {
        const Vec2 center = j.contains("center") ? detail::vec2_at(j, "center") : Vec2{20.0, 20.0};
        Vec2 coeff{1.0, 8.0};
        if (j.contains("coeff")) coeff = detail::vec2_at(j, "coeff");
        field = make_ellipse(center, coeff.x, coeff.y);
    } else if (kind == "matyas") {
        field = make_matyas();
    } else if (kind == "polynomial") {
        if (!j.contains("terms") || !j.at("terms").is_array())
            throw ConfigError("key \"field.terms\" must be an array of [i,j,c] triples");
        std::vector<MonomialTerm> terms;
        for (const auto& t : j.at("terms")) {
            if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
                !t[1].is_number_integer() || !t[2].is_number())
                throw ConfigError("key \"field.terms\" entries must be [i,j,c] triples");
            terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
        }
        try {
            field = make_polynomial(std::move(terms), Box{{-15.0, -15.0}, {15.0, 15.0}});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("key \"field.terms\": ") + e.what());
        }
    } else {
        throw ConfigError("key \"field.kind\" must be one of ellipse|matyas|polynomial");
    }
    if (j.contains("domain_box")) field.domain_box = detail::box_at(j.at("domain_box"), "field.domain_box");
    return field;
}

inline const std::vector<std::string>& sweepable_paths() {
    static const std::vector<std::string> paths = {
        "dt",        "steps",       "noise_sigma",  "params.k1",      "params.k2",
        "params.C",  "params.a",    "params.epsilon", "params.d0",    "params.z_d",
        "params.sgn_deadband",      "monitor.b",    "monitor.z_max"};
    return paths;
}

/// Assign one numeric parameter by path (see sweepable_paths()).
inline void apply_param(ExperimentConfig& cfg, const std::string& path, double value) {
    if (path == "dt") cfg.sim.dt = value;
    else if (path == "steps") cfg.sim.steps = static_cast<std::int64_t>(value);
    else if (path == "noise_sigma") cfg.sim.noise_sigma = value;
    else if (path == "params.k1") cfg.sim.params.k1 = value;
    else if (path == "params.k2") cfg.sim.params.k2 = value;
    else if (path == "params.C") cfg.sim.params.C = value;
    else if (path == "params.a") cfg.sim.params.a = value;
    else if (path == "params.epsilon") cfg.sim.params.epsilon = value;
    else if (path == "params.d0") cfg.sim.params.d0 = value;
    else if (path == "params.z_d") cfg.sim.params.z_d = value;
    else if (path == "params.sgn_deadband") cfg.sim.params.sgn_deadband = value;
    else if (path == "monitor.b") cfg.monitor.b = value;
    else if (path == "monitor.z_max") cfg.monitor.z_max = value;
    else throw ConfigError("sweep key \"" + path + "\" is not a sweepable numeric parameter");
}

inline ExperimentConfig parse_config_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("top-level config must be a JSON object");
    ExperimentConfig cfg;

    if (!j.contains("field")) throw ConfigError("missing required key \"field\"");
    cfg.sim.field = parse_field(j.at("field"));

    if (!j.contains("params") || !j.at("params").is_object())
        throw ConfigError("key \"params\" must be an object");
    const Json& p = j.at("params");
    cfg.sim.params.k1 = detail::num_at(p, "k1");
    cfg.sim.params.k2 = detail::num_at(p, "k2");
    cfg.sim.params.C = detail::num_at(p, "C");
    cfg.sim.params.a = detail::num_at(p, "a");
    cfg.sim.params.epsilon = detail::num_at(p, "epsilon");
    cfg.sim.params.d0 = detail::num_at(p, "d0");
    cfg.sim.params.z_d = detail::num_at(p, "z_d");
    cfg.sim.params.sgn_deadband = detail::num_or(p, "sgn_deadband", 0.0);

    cfg.sim.dt = detail::num_or(j, "dt", 0.01);
    const double steps = detail::num_or(j, "steps", 30000.0);
    cfg.sim.steps = static_cast<std::int64_t>(steps);
    if (cfg.sim.steps < 1) throw ConfigError("key \"steps\" must be a positive integer");
    cfg.sim.noise_sigma = detail::num_or(j, "noise_sigma", 0.0);
    cfg.sim.seed = static_cast<std::uint64_t>(detail::num_or(j, "seed", 1.0));

    if (j.contains("integrator")) {
        const auto& integ = j.at("integrator");
        if (!integ.is_string()) throw ConfigError("key \"integrator\" must be a string");
        const std::string s = integ.get<std::string>();
        if (s == "euler") cfg.sim.integrator = Integrator::Euler;
        else if (s == "midpoint") cfg.sim.integrator = Integrator::Midpoint;
        else throw ConfigError("key \"integrator\" must be euler|midpoint");
    }

    if (!j.contains("init") || !j.at("init").is_object())
        throw ConfigError("key \"init\" must be an object");
    const Json& init = j.at("init");
    if (init.contains("center")) {
        PlacedInit placed;
        placed.center = detail::vec2_at(init, "center");
        placed.gamma0 = detail::num_at(init, "gamma0");
        cfg.sim.init = placed;
    } else if (init.contains("r1") || init.contains("r2")) {
        cfg.sim.init = ExplicitInit{detail::vec2_at(init, "r1"), detail::vec2_at(init, "r2")};
    } else {
        throw ConfigError("key \"init\" needs either {center, gamma0} or {r1, r2}");
    }

    const Json monitor = j.contains("monitor") ? j.at("monitor") : Json::object();
    if (!monitor.is_object()) throw ConfigError("key \"monitor\" must be an object");
    cfg.monitor.b = detail::num_or(monitor, "b", 0.99);
    // Default bound: the annulus ceiling, the largest value the center can
    // take while still inside the target band.
    cfg.monitor.z_max =
        detail::num_or(monitor, "z_max", cfg.sim.params.z_d + cfg.sim.params.epsilon);

    const double window = detail::num_or(j, "window", 100.0);
    if (window < 1.0) throw ConfigError("key \"window\" must be a positive integer");
    cfg.metrics.window = static_cast<int>(window);
    cfg.metrics.winding_ref = j.contains("winding_ref") ? detail::vec2_at(j, "winding_ref")
                                                        : default_winding_ref(cfg.sim.field);

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("key \"output_dir\" must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }

    if (j.contains("emit")) {
        if (!j.at("emit").is_array()) throw ConfigError("key \"emit\" must be an array");
        cfg.emit_trajectory = cfg.emit_summary = cfg.emit_plot = false;
        for (const auto& e : j.at("emit")) {
            if (!e.is_string()) throw ConfigError("key \"emit\" entries must be strings");
            const std::string s = e.get<std::string>();
            if (s == "trajectory") cfg.emit_trajectory = true;
            else if (s == "summary") cfg.emit_summary = true;
            else if (s == "plot") cfg.emit_plot = true;
            else throw ConfigError("key \"emit\" entries must be trajectory|summary|plot");
        }
    }

    if (j.contains("sweep")) {
        if (!j.at("sweep").is_object() || j.at("sweep").empty())
            throw ConfigError("key \"sweep\" must be a non-empty object");
        for (const auto& [path, values] : j.at("sweep").items()) {
            bool known = false;
            for (const auto& known_path : sweepable_paths()) known |= (known_path == path);
            if (!known)
                throw ConfigError("sweep key \"" + path + "\" is not a sweepable numeric parameter");
            if (!values.is_array() || values.empty())
                throw ConfigError("sweep key \"" + path + "\" must map to a non-empty array");
            std::vector<double> vals;
            for (const auto& v : values) {
                if (!v.is_number())
                    throw ConfigError("sweep key \"" + path + "\" values must be numbers");
                vals.push_back(v.get<double>());
            }
            cfg.sweep.emplace_back(path, std::move(vals));
        }
    }

    try {
        validate(cfg.sim);
        validate(cfg.monitor);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file \"" + path + "\" is not valid JSON: " + e.what());
    }
    return parse_config_json(j);
}

inline Json summary_to_json(const RunSummary& s) {
    Json j = Json::object();
    j["converged"] = s.converged;
    j["convergence_step"] = s.convergence_step ? Json(*s.convergence_step) : Json(nullptr);
    j["convergence_time"] = s.convergence_time ? Json(*s.convergence_time) : Json(nullptr);
    j["mean_abs_error_post"] = s.mean_abs_error_post ? Json(*s.mean_abs_error_post) : Json(nullptr);
    j["max_abs_error_post"] = s.max_abs_error_post ? Json(*s.max_abs_error_post) : Json(nullptr);
    j["loops_completed"] = s.loops_completed;
    j["arc_length_traveled"] = s.arc_length_traveled;
    j["lemma_violations"] = s.lemma_violations;
    j["lemma_not_applicable"] = s.lemma_not_applicable;
    j["theorem_violations"] = s.theorem_violations;
    j["aborted"] = s.aborted;
    j["abort_reason"] = s.abort_reason;
    j["rng_id"] = s.rng_id;
    return j;
}

inline RunSummary summary_from_json(const Json& j) {
    RunSummary s;
    s.converged = j.at("converged").get<bool>();
    if (!j.at("convergence_step").is_null())
        s.convergence_step = j.at("convergence_step").get<std::int64_t>();
    if (!j.at("convergence_time").is_null())
        s.convergence_time = j.at("convergence_time").get<double>();
    if (!j.at("mean_abs_error_post").is_null())
        s.mean_abs_error_post = j.at("mean_abs_error_post").get<double>();
    if (!j.at("max_abs_error_post").is_null())
        s.max_abs_error_post = j.at("max_abs_error_post").get<double>();
    s.loops_completed = j.at("loops_completed").get<double>();
    s.arc_length_traveled = j.at("arc_length_traveled").get<double>();
    s.lemma_violations = j.at("lemma_violations").get<std::int64_t>();
    s.lemma_not_applicable = j.at("lemma_not_applicable").get<std::int64_t>();
    s.theorem_violations = j.at("theorem_violations").get<std::int64_t>();
    s.aborted = j.at("aborted").get<bool>();
    s.abort_reason = j.at("abort_reason").get<std::string>();
    s.rng_id = j.at("rng_id").get<std::string>();
    return s;
}

}  // namespace curvetrak
