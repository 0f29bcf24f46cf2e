#pragma once

#include <string>
#include <vector>

#include "ccr/harness.hpp"

namespace ccr {

/// Static SVG chart of mean MSE against n, one panel per delta, one
/// series per estimator with its quantile band. Log-scale y. Rendering
/// is deterministic: byte-identical input gives byte-identical output.
std::string render_mse_plot(const std::vector<SummaryRecord>& summaries);

void write_mse_plot(const std::vector<SummaryRecord>& summaries, const std::string& path);

}  // namespace ccr
