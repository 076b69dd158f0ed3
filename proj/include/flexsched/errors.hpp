#pragma once

#include <stdexcept>
#include <string>

namespace flexsched {

// Every error carries the CLI exit code it maps to.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kSolverAbort = 4;
inline constexpr int kIo = 5;
}  // namespace exit_code

#define FLEXSCHED_ERROR(Name, code)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(what, code) {}   \
  }

FLEXSCHED_ERROR(NoActiveRound, exit_code::kValidation);
FLEXSCHED_ERROR(UnknownConfig, exit_code::kValidation);
FLEXSCHED_ERROR(ValidationError, exit_code::kValidation);
FLEXSCHED_ERROR(BadParams, exit_code::kValidation);
FLEXSCHED_ERROR(TooLarge, exit_code::kValidation);
FLEXSCHED_ERROR(ZeroOperation, exit_code::kValidation);
FLEXSCHED_ERROR(InfeasibleByConstruction, exit_code::kInfeasible);
FLEXSCHED_ERROR(InfeasibleDay, exit_code::kInfeasible);
FLEXSCHED_ERROR(SolutionIncomplete, exit_code::kSolverAbort);
FLEXSCHED_ERROR(NumericalBreakdown, exit_code::kSolverAbort);
FLEXSCHED_ERROR(SolverAborted, exit_code::kSolverAbort);
FLEXSCHED_ERROR(IoError, exit_code::kIo);
FLEXSCHED_ERROR(ParseError, exit_code::kIo);
FLEXSCHED_ERROR(GapError, exit_code::kIo);
FLEXSCHED_ERROR(MissingPrices, exit_code::kIo);

#undef FLEXSCHED_ERROR

}  // namespace flexsched
