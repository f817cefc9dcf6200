#pragma once

#include <string>

namespace dsblow {

/// Outcome of a time integration (PDE evolution or criterion ODE).
enum class RunStatus { BlewUp, SurvivedToTmax, NumericalFailure };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

}  // namespace dsblow
