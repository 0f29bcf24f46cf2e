#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ccr/dataset.hpp"

namespace ccr {

// Dataset container: the magic line "CCRD1\n", one JSON header line with
// dims / config / presence flags, then raw little-endian float64 blocks
// in column-major order: y, z_x, z_w and, when truth is present,
// x, w, beta, eps. Perturbations h_x, h_w are rebuilt on load.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

nlohmann::json dgp_config_to_json(const DgpConfig& config);
DgpConfig dgp_config_from_json(const nlohmann::json& j);

}  // namespace ccr
