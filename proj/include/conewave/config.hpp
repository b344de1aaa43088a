#pragma once

#include <string>
#include <string_view>

#include "conewave/experiments.hpp"

namespace conewave {

// Parses a TOML document whose keys mirror the ExperimentConfig fields. Unknown keys,
// wrong types and out-of-range values raise ConfigError; `p`, `q` accept "inf".
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

}  // namespace conewave
