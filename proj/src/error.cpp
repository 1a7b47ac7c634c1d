#include "gridfreq/error.hpp"

namespace gridfreq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConnected: return "NotConnected";
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::WrongFamily: return "WrongFamily";
    case ErrorKind::Unjoinable: return "Unjoinable";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Usage: return "UsageError";
  }
  return "Unknown";
}

}  // namespace gridfreq
