#pragma once

// Flat "key = value" run configuration files. Blank lines and lines starting
// with '#' are ignored; unknown keys are errors.

#include <string>
#include <vector>

#include "hsicnet/network.hpp"

namespace hsicnet {

/// Keys accepted by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_text(const RunConfig& config);

}  // namespace hsicnet
