#include "dsblow/status.hpp"

#include <stdexcept>

namespace dsblow {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::BlewUp: return "BlewUp";
    case RunStatus::SurvivedToTmax: return "SurvivedToTmax";
    case RunStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "BlewUp") return RunStatus::BlewUp;
  if (s == "SurvivedToTmax") return RunStatus::SurvivedToTmax;
  if (s == "NumericalFailure") return RunStatus::NumericalFailure;
  throw std::invalid_argument("unknown run status: " + s);
}

}  // namespace dsblow
