#include "implorenz/errors.hpp"

namespace implorenz {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::Escape: return "Escape";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::OutOfSection: return "OutOfSection";
    case ErrorKind::NotInFlowBox: return "NotInFlowBox";
    case ErrorKind::ConeEscape: return "ConeEscape";
    case ErrorKind::DegenerateRoof: return "DegenerateRoof";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::Unstable: return "Unstable";
  }
  return "Unknown";
}

}  // namespace implorenz
