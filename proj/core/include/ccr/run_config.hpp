#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ccr/harness.hpp"

namespace ccr {

// Top-level configuration document shared by the CLI subcommands.
// Unknown keys are rejected everywhere: sweeps are expensive and a
// silently ignored typo is worse than an error.
struct RunConfig {
    DgpConfig dgp;        // defaults match the reference design
    SimulationPlan plan;  // plan.dgp mirrors `dgp`
    std::string out_dir = "out";

    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json run_config_to_json(const RunConfig& config);

RunConfig load_run_config(const std::string& path);

/// Built-in defaults: single moderate cell, the four reference estimators.
RunConfig default_run_config();

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j, const DgpConfig& dgp);
nlohmann::json estimator_spec_to_json(const EstimatorSpec& spec);

}  // namespace ccr
