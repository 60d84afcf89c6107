#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oactl {

// Bad user input: malformed config/expression text, dimension mismatches,
// unreadable artifact files.  The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in an expression or config file.  `offset` is the byte offset
// into the parsed text at which the problem was detected.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : InputError(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluating dynamics produced a non-finite value or hit a domain error
// (e.g. division by zero inside an expression).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A synthesis problem was proved infeasible.  Carries a short description of
// the infeasibility certificate.  The CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: solver divergence, iteration limits on problems that
// should converge, singular systems.  The CLI maps this to exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oactl
