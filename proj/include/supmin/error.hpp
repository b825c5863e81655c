#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace supmin {

enum class ErrorKind {
  kNegativeLagrangian,
  kNonFinite,
  kOutOfDomain,
  kZeroStep,
  kEmptyInterval,
  kBadWeights,
  kLineSearchFailure,
  kNonUniformGrid,
  kBadDelta,
  kGridTooCoarse,
  kTooFewEntries,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace supmin
