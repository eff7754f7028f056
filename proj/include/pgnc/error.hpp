#pragma once

#include <stdexcept>
#include <string>

namespace pgnc {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kSynthesis = 5,
  kSolver = 6,
  kDivergence = 7,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode code() const { return ExitCode::kFailure; }
};

/// File missing or unreadable/unwritable.
class IoError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kIo; }
};

/// Malformed scenario or artifact (carries line/key diagnostics in the text).
class ParseError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kParse; }
};

/// Gain synthesis failed (Riccati non-convergence, infeasible set-point map).
class SynthesisError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kSynthesis; }
};

/// Boundary-value solver failed (singular Jacobian, Newton stagnation).
class SolverError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kSolver; }
};

/// Closed-loop simulation blew up.
class DivergenceError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kDivergence; }
};

}  // namespace pgnc
