#include "mating/error.hpp"

namespace mating {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NotACycle: return "NotACycle";
    case Errc::NotRigidRotation: return "NotRigidRotation";
    case Errc::NotParabolic: return "NotParabolic";
    case Errc::DegreeNotFound: return "DegreeNotFound";
    case Errc::NotConverged: return "NotConverged";
    case Errc::LeftSector: return "LeftSector";
    case Errc::Undecided: return "Undecided";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::LabelingUndecided: return "LabelingUndecided";
    case Errc::NotIrrational: return "NotIrrational";
    case Errc::NewtonDiverged: return "NewtonDiverged";
    case Errc::FlowTrapped: return "FlowTrapped";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::RootDisk: return "RootDisk";
    case Errc::ImmediateBasin: return "ImmediateBasin";
    case Errc::OmegaUnavailable: return "OmegaUnavailable";
    case Errc::InsufficientResolution: return "InsufficientResolution";
    case Errc::Inadmissible: return "Inadmissible";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

bool is_numerical(Errc code) {
  switch (code) {
    case Errc::NotParabolic:
    case Errc::DegreeNotFound:
    case Errc::NotConverged:
    case Errc::LeftSector:
    case Errc::Undecided:
    case Errc::NoConvergence:
    case Errc::LabelingUndecided:
    case Errc::NewtonDiverged:
    case Errc::FlowTrapped:
    case Errc::Inconsistent:
    case Errc::InsufficientResolution:
      return true;
    default:
      return false;
  }
}

}  // namespace mating
