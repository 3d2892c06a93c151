#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spmc/angles.hpp"
#include "spmc/geometry.hpp"
#include "spmc/localization.hpp"

namespace spmc {

/// A localization scenario loaded from a scene file: anchor layout, schedule,
/// the true device position, and how each measurement's variance is obtained
/// (fixed values or derived from the DoA CRLB).
///
/// Scene JSON schema (all lengths in meters, angles in radians):
/// {
///   "anchors":        [[x, y], ...],
///   "schedule":       [anchor_index, ...],          // optional: one pass over all anchors
///   "true_position":  [x, y],
///   "sigma_phi_rad":  0.005 | [s1, s2, ...]         // per measurement, OR
///   "sigma_phi":      "from_crlb",
///   "receiver":       {"num_rx": 8, "spacing_over_lambda": 0.5, "kappa": 100.0}
///                        // required with "from_crlb"; the device is assumed
///                        // to steer its array at the scheduled anchor, so
///                        // the bound is evaluated at broadside.
/// }
struct Scene {
    AnchorSet anchors;
    Vec2 true_position;
    std::vector<double> sigma_phi_variances; // rad^2, aligned with the schedule
    bool variances_from_crlb = false;
};

class SceneParseError : public std::runtime_error {
public:
    explicit SceneParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline Vec2 parse_point(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SceneParseError("scene: field '" + field + "' must be a [x, y] number pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

inline Scene parse_scene(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"anchors",       "schedule", "true_position",
                                                   "sigma_phi_rad", "sigma_phi", "receiver"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) throw SceneParseError("scene: unknown field '" + key + "'");
    }

    Scene s;
    if (!j.contains("anchors") || !j["anchors"].is_array() || j["anchors"].empty()) {
        throw SceneParseError("scene: field 'anchors' must be a nonempty array of [x, y] pairs");
    }
    std::size_t idx = 0;
    for (const auto& a : j["anchors"]) {
        s.anchors.positions.push_back(
            detail::parse_point(a, "anchors[" + std::to_string(idx) + "]"));
        ++idx;
    }

    if (j.contains("schedule")) {
        if (!j["schedule"].is_array() || j["schedule"].empty()) {
            throw SceneParseError("scene: field 'schedule' must be a nonempty index array");
        }
        for (const auto& e : j["schedule"]) {
            if (!e.is_number_unsigned()) {
                throw SceneParseError("scene: field 'schedule' entries must be anchor indices");
            }
            const auto v = e.get<std::size_t>();
            if (v >= s.anchors.positions.size()) {
                throw SceneParseError("scene: field 'schedule' index " + std::to_string(v) +
                                      " out of range");
            }
            s.anchors.schedule.push_back(v);
        }
    } else {
        for (std::size_t i = 0; i < s.anchors.positions.size(); ++i) {
            s.anchors.schedule.push_back(i);
        }
    }

    if (!j.contains("true_position")) {
        throw SceneParseError("scene: field 'true_position' is required");
    }
    s.true_position = detail::parse_point(j["true_position"], "true_position");

    const bool has_fixed = j.contains("sigma_phi_rad");
    const bool has_directive = j.contains("sigma_phi");
    if (has_fixed == has_directive) {
        throw SceneParseError(
            "scene: exactly one of 'sigma_phi_rad' or 'sigma_phi' must be given");
    }

    if (has_fixed) {
        const auto& f = j["sigma_phi_rad"];
        if (f.is_number()) {
            const double sd = f.get<double>();
            if (!(sd > 0.0)) throw SceneParseError("scene: field 'sigma_phi_rad' must be > 0");
            s.sigma_phi_variances.assign(s.anchors.schedule.size(), sd * sd);
        } else if (f.is_array() && f.size() == s.anchors.schedule.size()) {
            for (const auto& e : f) {
                if (!e.is_number() || !(e.get<double>() > 0.0)) {
                    throw SceneParseError("scene: field 'sigma_phi_rad' entries must be > 0");
                }
                const double sd = e.get<double>();
                s.sigma_phi_variances.push_back(sd * sd);
            }
        } else {
            throw SceneParseError(
                "scene: field 'sigma_phi_rad' must be a number or one number per measurement");
        }
    } else {
        if (!j["sigma_phi"].is_string() || j["sigma_phi"].get<std::string>() != "from_crlb") {
            throw SceneParseError("scene: field 'sigma_phi' only supports \"from_crlb\"");
        }
        if (!j.contains("receiver") || !j["receiver"].is_object()) {
            throw SceneParseError("scene: field 'receiver' is required with sigma_phi=from_crlb");
        }
        const auto& r = j["receiver"];
        for (const auto& [key, value] : r.items()) {
            (void)value;
            if (key != "num_rx" && key != "spacing_over_lambda" && key != "kappa") {
                throw SceneParseError("scene: unknown field 'receiver." + key + "'");
            }
        }
        ArrayGeometry geom;
        if (r.contains("num_rx")) geom.num_rx = r["num_rx"].get<int>();
        if (r.contains("spacing_over_lambda")) {
            geom.spacing_over_lambda = r["spacing_over_lambda"].get<double>();
        }
        double kappa = 100.0;
        if (r.contains("kappa")) kappa = r["kappa"].get<double>();
        if (!(kappa > 0.0)) throw SceneParseError("scene: field 'receiver.kappa' must be > 0");
        geom.validate();
        const std::vector<Concentration> kappas(static_cast<std::size_t>(geom.num_baselines()),
                                                Concentration(kappa));
        const double var = sigma_phi_from_crlb(kappas, geom, 0.0);
        s.sigma_phi_variances.assign(s.anchors.schedule.size(), var);
        s.variances_from_crlb = true;
    }

    s.anchors.validate();
    return s;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneParseError("scene: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneParseError("scene: JSON parse error in '" + path + "': " + e.what());
    }
    return parse_scene(j);
}

} // namespace spmc
