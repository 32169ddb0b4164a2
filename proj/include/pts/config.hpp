#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pts/errors.hpp"
#include "pts/pipeline.hpp"

namespace pts {

/// Parses a flat JSON config object. Missing keys keep module defaults;
/// unknown keys are rejected with the offending key path in the message.
inline TrackerConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("config root must be a JSON object");

    TrackerConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n") cfg.reference_interval = value.get<int>();
            else if (key == "reinit_gap") cfg.reinit_gap = value.get<int>();
            else if (key == "matcher") cfg.matcher_key = value.get<std::string>();
            else if (key == "objectness_threshold") cfg.objectness_threshold = value.get<double>();
            else if (key == "tau_pix") cfg.matcher.tau_pix = value.get<double>();
            else if (key == "velocity_threshold") cfg.region.velocity_threshold = value.get<double>();
            else if (key == "out_resolution") cfg.region.out_resolution = value.get<int>();
            else if (key == "pad_value") cfg.region.pad_value = value.get<double>();
            else if (key == "max_iterations") cfg.ransac.max_iterations = value.get<int>();
            else if (key == "inlier_threshold") cfg.ransac.inlier_threshold = value.get<double>();
            else if (key == "min_inlier_fraction") cfg.ransac.min_inlier_fraction = value.get<double>();
            else if (key == "rng_seed") cfg.ransac.rng_seed = value.get<std::uint64_t>();
            else if (key == "q_position") {
                cfg.kalman.Q(0, 0) = cfg.kalman.Q(1, 1) = value.get<double>();
            } else if (key == "q_velocity") {
                cfg.kalman.Q(2, 2) = cfg.kalman.Q(3, 3) = value.get<double>();
            } else if (key == "r_measurement") {
                cfg.kalman.R(0, 0) = cfg.kalman.R(1, 1) = value.get<double>();
            } else {
                throw ConfigError("unknown config key: \"" + key + "\"");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("bad value for \"" + key + "\": " + e.what());
        }
    }
    if (cfg.reference_interval < 1)
        throw ConfigError("n must be >= 1");
    if (cfg.reinit_gap < 0)
        throw ConfigError("reinit_gap must be >= 0");
    if (cfg.region.out_resolution < 16)
        throw ConfigError("out_resolution must be >= 16");
    return cfg;
}

inline TrackerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace pts
