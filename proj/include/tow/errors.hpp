#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tow {

// Base of every exception thrown by this library. what() always starts with
// the concrete error name so diagnostics stay grep-able.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define TOW_DEFINE_ERROR(NAME)                                      \
  struct NAME : Error {                                             \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  };

// markov
TOW_DEFINE_ERROR(NotSquare)
TOW_DEFINE_ERROR(RowSumViolation)
TOW_DEFINE_ERROR(NonpositiveOffDiagonal)
TOW_DEFINE_ERROR(ModeOutOfRange)

// domain
TOW_DEFINE_ERROR(DegenerateDomain)
TOW_DEFINE_ERROR(SpacingTooCoarse)
TOW_DEFINE_ERROR(OutOfDomain)
TOW_DEFINE_ERROR(NotInterior)
TOW_DEFINE_ERROR(NotUnit)

// exact
TOW_DEFINE_ERROR(NonpositiveRadius)
TOW_DEFINE_ERROR(OutOfBall)
TOW_DEFINE_ERROR(StepTooLarge)
TOW_DEFINE_ERROR(OutOfAnnulus)

// solver
TOW_DEFINE_ERROR(TooCloseToBoundary)

// analysis
TOW_DEFINE_ERROR(BallNotContained)
TOW_DEFINE_ERROR(RadiusOrder)

// cli
TOW_DEFINE_ERROR(UnknownIdentifier)
TOW_DEFINE_ERROR(EvalError)
TOW_DEFINE_ERROR(ConfigError)

// catch-all for violated preconditions that have no dedicated name
TOW_DEFINE_ERROR(InvalidArgument)

#undef TOW_DEFINE_ERROR

// Expression parse failure; keeps the byte offset of the offending token.
struct SyntaxError : Error {
  std::size_t offset;
  SyntaxError(const std::string& msg, std::size_t at)
      : Error("SyntaxError at byte " + std::to_string(at) + ": " + msg), offset(at) {}
};

// Episode hit the step cap; the strategy pair does not terminate.
struct StalledGame : Error {
  std::uint64_t episode;
  std::uint64_t steps;
  StalledGame(std::uint64_t ep, std::uint64_t n)
      : Error("StalledGame: episode " + std::to_string(ep) + " exceeded " +
              std::to_string(n) + " steps"),
        episode(ep), steps(n) {}
};

}  // namespace tow
