#pragma once

#include "cns/grid.hpp"
#include "cns/model_config.hpp"
#include "cns/scenario.hpp"
#include "cns/stokes.hpp"
#include "cns/timestepper.hpp"

#include <cstdint>
#include <string>

#include "json.hpp"

namespace cns {

/// Environment variable that replaces output.root (command-line flags still win).
inline constexpr const char* kOutputRootEnv = "CNS_OUTPUT_ROOT";

struct OutputSettings {
    std::string root = "cns_output";
    std::string name = "run";
    bool checkpoint = true;
};

struct RunConfig {
    ModelParams params;
    SensitivitySpec sensitivity;
    PotentialSpec potential;
    Grid grid = Grid::square(32);
    TimeSettings time;
    SolverSettings solvers;
    int cadence = 1;
    OutputSettings output;
    InitialSpec initial;
    std::uint64_t seed = 1;
    bool allow_subthreshold = false;
    int workers = 0;  ///< sweep concurrency; 0 = hardware threads
};

/// Strict parse: unknown keys and wrongly typed values are ValidationErrors.
/// Only "m" and "grid" are required.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

/// Sets a dotted key ("time.horizon") in a raw config document, creating
/// intermediate objects.
void set_config_value(nlohmann::json& doc, const std::string& dotted_key, const nlohmann::json& value);

/// Applies CNS_OUTPUT_ROOT if set.
void apply_environment(nlohmann::json& doc);

} // namespace cns
