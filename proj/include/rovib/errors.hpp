#pragma once

#include <stdexcept>
#include <string>

namespace rovib {

/// Base of every error raised by the library.
///
/// `is_usage()` separates bad input (config, selectors, quantum numbers) from
/// numerical failures; the CLI maps the former to exit code 2 and the latter
/// to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, bool usage) : std::runtime_error(what), usage_(usage) {}
  bool is_usage() const noexcept { return usage_; }

 private:
  bool usage_;
};

#define ROVIB_DEFINE_ERROR(Name, usage)                                     \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name ": " + what, usage) {} \
  }

ROVIB_DEFINE_ERROR(IncompatibleUnits, true);
ROVIB_DEFINE_ERROR(ParseError, true);
ROVIB_DEFINE_ERROR(ValidationError, true);
ROVIB_DEFINE_ERROR(InvalidParameter, true);
ROVIB_DEFINE_ERROR(InvalidQuantumNumbers, true);
ROVIB_DEFINE_ERROR(InvalidEnergy, true);
ROVIB_DEFINE_ERROR(InsufficientLevels, true);
ROVIB_DEFINE_ERROR(MissingDipole, true);
ROVIB_DEFINE_ERROR(SelectionRuleViolation, true);
ROVIB_DEFINE_ERROR(DegeneratePair, true);
ROVIB_DEFINE_ERROR(AllPoles, true);
ROVIB_DEFINE_ERROR(ConvergenceError, false);
ROVIB_DEFINE_ERROR(OnResonance, false);

#undef ROVIB_DEFINE_ERROR

}  // namespace rovib
