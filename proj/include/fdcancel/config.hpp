#pragma once

#include <string>

#include "fdcancel/experiments.hpp"

namespace fdcancel::config {

// Parses a scenario description. Accepts the INI-style config format or a
// previously written run manifest (JSON, detected by a leading brace).
experiments::ScenarioPreset parse_text(const std::string& text);

experiments::ScenarioPreset load_file(const std::string& path);

// Manifest carrying the fully resolved preset; feeding it back through
// load_file reproduces the run sample for sample.
std::string manifest_text(const experiments::SweepResult& result,
                          const std::string& csv_name);

}  // namespace fdcancel::config
