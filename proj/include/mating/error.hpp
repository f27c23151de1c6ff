#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mating {

enum class Errc {
  NotACycle,
  NotRigidRotation,
  NotParabolic,
  DegreeNotFound,
  NotConverged,
  LeftSector,
  Undecided,
  NoConvergence,
  LabelingUndecided,
  NotIrrational,
  NewtonDiverged,
  FlowTrapped,
  Inconsistent,
  RootDisk,
  ImmediateBasin,
  OmegaUnavailable,
  InsufficientResolution,
  Inadmissible,
  SchemaMismatch,
  Parse,
};

std::string_view errc_name(Errc code);

// True for failures of a numerical procedure (the CLI maps these to exit 2).
bool is_numerical(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace mating
