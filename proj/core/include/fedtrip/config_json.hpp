#pragma once

#include <string>

#include "fedtrip/experiment.hpp"

namespace fedtrip {

// Parses a plan from JSON text. Field names mirror the config structs in
// snake_case; unknown keys are errors so hyperparameter typos fail loudly.
ExperimentPlan plan_from_json(const std::string& text);

// Reads and parses a plan file.
ExperimentPlan load_plan(const std::string& path);

}  // namespace fedtrip
