#pragma once

#include "cfsyn/controller.hpp"
#include "cfsyn/synthesis.hpp"

#include <string>

namespace cfsyn {

/// JSON image of a controller. Every numeric field carries a >= 30
/// significant digit decimal expansion plus the exact numerator/denominator
/// pair; reloading reconstructs the exact data and refreezes it, so theta and u
/// evaluations round-trip bit-for-bit.
std::string controller_to_json(const ControllerSpec& spec);

/// Parses and refreezes a controller. Throws std::runtime_error with a
/// description on malformed input. Only structural validity is enforced
/// here; semantic health is the verify command's job, so deliberately
/// corrupted gain data still loads.
ControllerSpec controller_from_json(const std::string& text);

void save_controller(const ControllerSpec& spec, const std::string& path);
ControllerSpec load_controller(const std::string& path);

std::string validity_report_to_json(const synthesis::ValidityReport& report);

}  // namespace cfsyn
