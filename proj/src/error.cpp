#include "supmin/error.hpp"

namespace supmin {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNegativeLagrangian: return "NegativeLagrangian";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kOutOfDomain: return "OutOfDomain";
    case ErrorKind::kZeroStep: return "ZeroStep";
    case ErrorKind::kEmptyInterval: return "EmptyInterval";
    case ErrorKind::kBadWeights: return "BadWeights";
    case ErrorKind::kLineSearchFailure: return "LineSearchFailure";
    case ErrorKind::kNonUniformGrid: return "NonUniformGrid";
    case ErrorKind::kBadDelta: return "BadDelta";
    case ErrorKind::kGridTooCoarse: return "GridTooCoarse";
    case ErrorKind::kTooFewEntries: return "TooFewEntries";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace supmin
