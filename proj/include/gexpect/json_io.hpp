#pragma once

#include "gexpect/experiments.hpp"
#include "gexpect/gheat.hpp"
#include "gexpect/nested_dp.hpp"
#include "gexpect/scenario.hpp"
#include "gexpect/test_function.hpp"

#include <json.hpp>

#include <string>

namespace gexpect {

// Wire formats:
//   family             {"measures": [{"atoms": [[value, prob], ...]}, ...]}
//   piecewise linear   {"knots": [[x, y], ...]}
//   other functions    catalog name string, e.g. "positive_part", "constant:7"
//   DP query           {"family":..., "phi":..., "n":..., "scaling":...,
//                       "backend": "exact_support" | {"grid": {"dx":..., "half_width":...}}}
//   DP result          {"value":..., "backend":..., "states_visited":..., "n":...}

nlohmann::json family_to_json(const ScenarioFamily& family);
ScenarioFamily family_from_json(const nlohmann::json& j);

nlohmann::json test_function_to_json(const TestFunction& f);
TestFunction test_function_from_json(const nlohmann::json& j);

nlohmann::json dp_query_to_json(const DPQuery& q);
DPQuery dp_query_from_json(const nlohmann::json& j);
nlohmann::json nested_result_to_json(const NestedResult& r);

/// Config documents mirror ExperimentConfig field names: sigmas, family,
/// band_override, phi, n_list, mean_shift, dx, half_width, safety_factor,
/// k_list, format.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// CSV body: header n,dp_value,reference,abs_error, one row per n with 17
/// significant digits, final comment line "# fitted_rate=<value>".
std::string report_to_csv(const ExperimentReport& report);
nlohmann::json report_to_json(const ExperimentReport& report);

/// CSV with header t,x,u, row-major by checkpoint, 17 significant digits.
std::string surface_to_csv(const SolutionSurface& surface);

} // namespace gexpect
