#ifndef FENE_ERRORS_HPP
#define FENE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fene {

/// A time-step restriction was violated (advective CFL and similar).
struct StabilityError : std::runtime_error {
  explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values appeared in evolved state.
struct NumericalBreakdown : std::runtime_error {
  explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters violate a hypothesis required for the requested quantity
/// to be meaningful (not merely out of numeric range).
struct HypothesisViolation : std::invalid_argument {
  explicit HypothesisViolation(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace fene

#endif
